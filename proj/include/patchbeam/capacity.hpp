#ifndef PATCHBEAM_CAPACITY_HPP
#define PATCHBEAM_CAPACITY_HPP

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "patchbeam/fem.hpp"
#include "patchbeam/geometry.hpp"
#include "patchbeam/material.hpp"
#include "patchbeam/regimes.hpp"

namespace patchbeam {

// Dirichlet profiles on the patch {0} x S0 of the half space.
enum class PatchProfileKind {
    Axial,    // e1
    Trans2,   // e2
    Trans3,   // e3
    Torsion,  // z3 e2 - z2 e3
    Rot2,     // z1 e2 - z2 e1  (z1 = 0 on the patch)
    Rot3      // z1 e3 - z3 e1
};

enum class Farfield { Natural, Clamped };

// Profile value at a patch point; throws MeshError off the patch.
Eigen::Vector3d patch_profile(PatchProfileKind kind, const Eigen::Vector3d& z,
                              const SectionShape& s0);

struct CapacityParams {
    double L = 16.0;
    HalfboxParams box;
    Farfield farfield = Farfield::Natural;
    double tol = 1e-10;
    int maxit_factor = 50;  // maxit = maxit_factor * sqrt(free dofs)
    int threads = 1;        // the six potential solves are independent
};

// One capacitary potential on a fresh truncated half-box mesh.  The batched
// CapacitarySet below shares the assembly across the six kinds; this entry
// point exists for single-potential use and tests.
DisplacementField solve_potential(PatchProfileKind kind, const SectionShape& s0,
                                  const VoigtMatrix& A0, const CapacityParams& params,
                                  std::shared_ptr<const VolumeMesh>* mesh_out = nullptr,
                                  SolveStats* stats = nullptr);

// Energy Gram G_ij = int A(0) e(p_i) : e(p_j) over the truncated box; all
// potentials must live on the same mesh.
Eigen::MatrixXd energy_gram(const VolumeMesh& mesh, const VoigtMatrix& A0,
                            const std::vector<const DisplacementField*>& potentials);

// Solves G_BB coef = -G_B,target; reports the basis condition number.
// Throws SolveError when the basis block is singular or ill conditioned.
Eigen::VectorXd orthogonalize(int target, const std::vector<int>& basis,
                              const Eigen::MatrixXd& G, double* condition = nullptr);

// The regime penalty on the canonical trace ordering
// (zeta2(0), zeta3(0), zeta1(0), c(0), zeta2'(0), zeta3'(0)); zero except on
// the regime's active sub-block.
struct PenaltyForm {
    RegimeTag regime = RegimeTag::SubCubic;
    double rho = 0.0;
    Eigen::Matrix<double, 6, 6> matrix = Eigen::Matrix<double, 6, 6>::Zero();
    std::vector<int> active_slots;

    Eigen::MatrixXd active_block() const;
};

// The six potentials, their Gram matrix, the orthogonalization coefficients
// and the derived penalty data for one (L, farfield) truncation.
class CapacitarySet {
  public:
    // Raw potential order in the Gram matrix: phi1 phi2 phi3 psi1 psi2 psi3.
    enum FieldId {
        kPhi1 = 0,
        kPhi2,
        kPhi3,
        kPsi1,
        kPsi2,
        kPsi3,
        kPhiHat1,  // phi1 + a_alpha phi^alpha
        kPsiHat1,  // psi^i + b^i_k phi^k
        kPsiHat2,
        kPsiHat3
    };

    static CapacitarySet build(const SectionShape& s0, const VoigtMatrix& A0,
                               const CapacityParams& params,
                               std::shared_ptr<const VolumeMesh> mesh = nullptr);

    const VolumeMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const VolumeMesh> mesh_ptr() const { return mesh_; }
    double L() const { return params_.L; }
    Farfield farfield() const { return params_.farfield; }
    const VoigtMatrix& A0() const { return A0_; }

    const Eigen::Matrix<double, 6, 6>& gram() const { return gram_; }
    const Eigen::Vector2d& a() const { return a_; }            // (a2, a3)
    const Eigen::Vector3d& b(int i) const { return b_[i]; }    // (b^i_1..3), i in 0..2
    double phi_condition() const { return phi_condition_; }

    double gram_hat_phi1() const { return gram_hat_phi1_; }      // k-hat
    const Eigen::Matrix3d& gram_hat_psi() const { return gram_hat_psi_; }

    const DisplacementField& field(FieldId id) const { return fields_[id]; }
    const SolveStats& stats(int raw_id) const { return stats_[raw_id]; }

    // Fraction of each raw potential's energy in the outer shell
    // |z|_inf >= 0.7 L; reported as the truncation-tail estimate.
    const Eigen::Matrix<double, 6, 1>& tail_fraction() const { return tail_fraction_; }

    bool inside(const Eigen::Vector3d& z) const;

    // Strain of a stored field at z, extended by zero outside the box.
    Eigen::Matrix3d strain(FieldId id, const Eigen::Vector3d& z) const;

  private:
    std::shared_ptr<const VolumeMesh> mesh_;
    CapacityParams params_;
    VoigtMatrix A0_ = VoigtMatrix::Zero();
    std::vector<DisplacementField> fields_;  // indexed by FieldId
    std::vector<SolveStats> stats_;
    Eigen::Matrix<double, 6, 6> gram_ = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Vector2d a_ = Eigen::Vector2d::Zero();
    Eigen::Vector3d b_[3] = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                             Eigen::Vector3d::Zero()};
    double phi_condition_ = 0.0;
    double gram_hat_phi1_ = 0.0;
    Eigen::Matrix3d gram_hat_psi_ = Eigen::Matrix3d::Zero();
    Eigen::Matrix<double, 6, 1> tail_fraction_ = Eigen::Matrix<double, 6, 1>::Zero();
};

// rho times the Gram of the regime's generators on the active trace slots;
// the zero form for non-critical regimes.
PenaltyForm penalty_form(const RegimeSpec& regime, const CapacitarySet& set);

// Smallest eigenvalue of the active block (this is n-hat * rho); requires a
// critical regime and throws CoercivityError if the value is not positive.
double coercivity_eigen(const PenaltyForm& penalty);

}  // namespace patchbeam

#endif

#ifndef PATCHBEAM_FEM_HPP
#define PATCHBEAM_FEM_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <vector>

#include "patchbeam/geometry.hpp"
#include "patchbeam/material.hpp"

namespace patchbeam {

// How material coordinates are computed from mesh coordinates.
//   Identity:        y = x                     (plain test meshes)
//   CylinderRescale: y = (x1, x'/eps)          (thin-cylinder problems)
//   Frozen:          y = 0                     (half-box problems at A(0))
enum class MaterialFrame { Identity, CylinderRescale, Frozen };

Eigen::Vector3d material_point(MaterialFrame frame, const Eigen::Vector3d& x, double eps);

using VectorField = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;
using TensorField = std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>;

// Symmetric sparse Galerkin system with 3 displacement dofs per node
// (dof = 3 * node + component).  Dirichlet constraints are handled by
// symmetric elimination: after impose_dirichlet the reduced matrix acts on
// free dofs only and the coupling block to constrained dofs is retained so
// the right-hand side can be rebuilt for new constraint values.
struct SparseSystem {
    int n_dofs = 0;
    Eigen::SparseMatrix<double, Eigen::RowMajor> K;  // full matrix (cleared on reduction)
    Eigen::VectorXd b;                               // full right-hand side

    bool reduced = false;
    Eigen::SparseMatrix<double, Eigen::RowMajor> K_red;  // free x free
    Eigen::SparseMatrix<double, Eigen::RowMajor> K_fc;   // free x constrained
    std::vector<int> free_dofs;                          // reduced index -> full dof
    std::vector<int> constrained;                        // sorted constrained dofs
    Eigen::VectorXd constrained_values;                  // parallel to `constrained`

    Eigen::VectorXd reduced_rhs() const;  // b[free] - K_fc * values
    Eigen::VectorXd reduced_rhs(const Eigen::VectorXd& values) const;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
};

// Nodal displacement coefficients (3 per node, trilinear interpolation).
struct DisplacementField {
    Eigen::VectorXd values;  // size 3 * node_count
    Eigen::Vector3d at_node(int i) const { return values.segment<3>(3 * i); }
};

// Per-quadrature-point symmetric strains, stored as engineering Voigt
// 6-vectors together with the quadrature weight (w * detJ) and the physical
// sample position.  Column s = element * 8 + local quadrature index.
struct StrainSamples {
    Eigen::Matrix<double, 6, Eigen::Dynamic> eng;
    Eigen::VectorXd weight;
    Eigen::Matrix3Xd pos;
    int sample_count() const { return static_cast<int>(weight.size()); }
};

// Stiffness of int A e(U):e(Ubar) with A evaluated in the given frame.
SparseSystem assemble_stiffness(const VolumeMesh& mesh, const MaterialField& material,
                                MaterialFrame frame);

// Consistent load for int F . Ubar with F = (f1(y), eps f2(y), eps f3(y)).
Eigen::VectorXd assemble_body_load(const VolumeMesh& mesh, const VectorField& f, double eps,
                                   MaterialFrame frame);

// Consistent load for int H : e(Ubar) with H(x) = h(y(x)); h must be
// symmetric-valued.
Eigen::VectorXd assemble_prestrain_load(const VolumeMesh& mesh, const TensorField& h,
                                        MaterialFrame frame);

// Clamp all three components of every node in `set` to the given values.
SparseSystem impose_dirichlet(SparseSystem sys, const std::vector<int>& set,
                              const std::function<Eigen::Vector3d(int)>& values);
SparseSystem impose_dirichlet_zero(SparseSystem sys, const std::vector<int>& set);

// Same elimination at dof granularity (used by the 1D limit system, whose
// dofs are not grouped in 3-vectors).
SparseSystem impose_dirichlet_dofs(SparseSystem sys, const std::vector<int>& dofs,
                                   const Eigen::VectorXd& values);

// Jacobi-preconditioned conjugate gradients on the reduced system; stops at
// ||b - K x|| <= tol * ||b||, throws SolveError past maxit.  Deterministic.
// `constraint_values` overrides sys.constrained_values (same reduced matrix,
// different Dirichlet data; used by the capacity solves).
DisplacementField solve_spd(const SparseSystem& sys, double tol, int maxit,
                            SolveStats* stats = nullptr,
                            const Eigen::VectorXd* constraint_values = nullptr);

StrainSamples strain_at_quadrature(const VolumeMesh& mesh, const DisplacementField& U);

// Field values at the same quadrature points (column s = element * 8 + q).
Eigen::Matrix3Xd displacement_at_quadrature(const VolumeMesh& mesh, const DisplacementField& U);

// Sum of w * (A e : e); pass eps for the cylinder frame.
double quadratic_energy(const StrainSamples& samples, const MaterialField& material,
                        MaterialFrame frame, double eps = 0.0);

// Pointwise evaluation inside one element at reference coordinates xi.
Eigen::Vector3d eval_displacement(const VolumeMesh& mesh, const DisplacementField& U, int elem,
                                  const Eigen::Vector3d& xi);
Eigen::Matrix3d eval_strain(const VolumeMesh& mesh, const DisplacementField& U, int elem,
                            const Eigen::Vector3d& xi);

}  // namespace patchbeam

#endif

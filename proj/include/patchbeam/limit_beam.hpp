#ifndef PATCHBEAM_LIMIT_BEAM_HPP
#define PATCHBEAM_LIMIT_BEAM_HPP

#include <Eigen/Core>
#include <array>
#include <memory>
#include <vector>

#include "patchbeam/capacity.hpp"
#include "patchbeam/expr.hpp"
#include "patchbeam/fem.hpp"
#include "patchbeam/geometry.hpp"
#include "patchbeam/material.hpp"
#include "patchbeam/regimes.hpp"

namespace patchbeam {

// 1D discretization of (0,1): Hermite cubics for the transverse deflections
// (H2 fields), quadratic Lagrange for the axial displacement and the twist
// (H1 fields), 3-point Gauss per element.
struct BeamGrid {
    int n = 32;

    double h() const { return 1.0 / n; }
    int n_hermite() const { return 2 * (n + 1); }
    int n_lagrange() const { return 2 * n + 1; }
    int total() const { return 2 * n_hermite() + 2 * n_lagrange(); }
    int off_z2() const { return 0; }
    int off_z3() const { return n_hermite(); }
    int off_z1() const { return 2 * n_hermite(); }
    int off_c() const { return 2 * n_hermite() + n_lagrange(); }

    // Gauss points and weights of element e, mapped to (0,1).
    static constexpr int kQpPerElem = 3;
    int cell_count() const { return kQpPerElem * n; }
    double qp_coord(int cell) const;
    double qp_weight_of(int cell) const;

    // Global dof indices of the six trace slots (canonical ordering).
    std::array<int, 6> trace_dofs() const;
};

// Static condensation of one cross-section slice: the 4x4 effective
// stiffness D mapping the macrostrain theta = (zeta1', zeta2'', zeta3'', c')
// to generalized stress, the condensed h-load, and the micro recovery modes
// (nodal (v1, w2, w3), one column per unit macrostrain plus the h response).
struct CellData {
    double y1 = 0.0;
    Eigen::Matrix4d D = Eigen::Matrix4d::Zero();
    Eigen::Vector4d g = Eigen::Vector4d::Zero();
    Eigen::MatrixXd modes;  // (3 * section nodes) x 5, dof = 3*node + {v1,w2,w3}
};

// Cross-section cell solver; precomputes quadrature geometry and reuses the
// constrained factorization when the material does not depend on y1.
class CellSolver {
  public:
    explicit CellSolver(std::shared_ptr<const SectionMesh> section);
    ~CellSolver();
    CellSolver(CellSolver&&) noexcept;
    CellSolver& operator=(CellSolver&&) noexcept;

    struct QuadPoint {
        int quad = 0;
        Eigen::Vector2d pos;
        double w = 0.0;
        Eigen::Vector4d N;
        Eigen::Matrix<double, 4, 2> dN;  // physical gradients (d/dy2, d/dy3)
    };

    const SectionMesh& section() const { return *section_; }
    std::shared_ptr<const SectionMesh> section_ptr() const { return section_; }
    const std::vector<QuadPoint>& quad_points() const { return qps_; }

    // Solve the constrained slice problem at y1 for the four unit macrostrain
    // modes and the h forcing (h = nullptr means no prestrain).
    CellData solve(const MaterialField& material, double y1,
                   const std::array<Expr, 6>* h) const;

    // Engineering strain 6-vector of the macrostrain modes at a point.
    static Voigt6 macro_mode(int mode, const Eigen::Vector2d& yp);

  private:
    struct Factorization;
    std::shared_ptr<const SectionMesh> section_;
    std::vector<QuadPoint> qps_;
    mutable std::unique_ptr<Factorization> cache_;
};

// Per-quadrature-point 1D load data: (N, M2, M3, Q2, Q3) with
//   N = int_S f1,  M_a = int_S f1 y_a,  Q_a = int_S f_a.
using BeamLoads = std::vector<Eigen::Matrix<double, 5, 1>>;

BeamLoads beam_loads(const std::array<Expr, 3>& f, const CellSolver& cells, const BeamGrid& grid);

// 1D Galerkin system with condensed cell stiffness, trace constraints and
// the regime penalty added on the trace dofs at y1 = 0.  The clamped-end
// conditions at y1 = 1 are always imposed.
SparseSystem assemble_limit_system(const std::vector<CellData>& cells, const BeamLoads& loads,
                                   const BeamGrid& grid, const std::vector<int>& trace_constraints,
                                   const Eigen::Matrix<double, 6, 6>& penalty);

// Limit fields: 1D coefficient sequences plus the per-slice micro data.
struct BeamSolution {
    BeamGrid grid;
    SectionShape section_shape;
    Eigen::VectorXd z2, z3;  // Hermite blocks: node i -> (value, derivative)
    Eigen::VectorXd z1, c;   // quadratic Lagrange blocks
    std::shared_ptr<const SectionMesh> section;
    std::vector<CellData> cells;  // per axial quadrature point

    double zeta1(double y1) const;
    double zeta1_prime(double y1) const;
    double zeta2(double y1) const;
    double zeta2_prime(double y1) const;
    double zeta2_pp(double y1) const;
    double zeta3(double y1) const;
    double zeta3_prime(double y1) const;
    double zeta3_pp(double y1) const;
    double twist(double y1) const;
    double twist_prime(double y1) const;

    // (zeta1', zeta2'', zeta3'', c') at y1.
    Eigen::Vector4d theta(double y1) const;

    // Trace vector (zeta2(0), zeta3(0), zeta1(0), c(0), zeta2'(0), zeta3'(0)).
    Eigen::Matrix<double, 6, 1> trace() const;

    // Index of the axial quadrature point nearest to y1.
    int nearest_cell(double y1) const;

    bool zero() const { return z2.isZero(0) && z3.isZero(0) && z1.isZero(0) && c.isZero(0); }
};

struct LimitProblem {
    MaterialField material;
    SectionShape section_shape;
    std::shared_ptr<const SectionMesh> section;  // mesh of S, unit scale
    std::array<Expr, 3> f;
    std::array<Expr, 6> h;  // Voigt order 11,22,33,23,13,12
    int n_axial = 32;
};

// Solve the limit problem for one regime; `penalty` may be null for
// non-critical regimes (it is then the zero form).
BeamSolution solve_limit(const LimitProblem& problem, const RegimeSpec& regime,
                         const PenaltyForm* penalty);

// Bernoulli-Navier displacement (u1, u2, u3) at y = (y1, y2, y3).
Eigen::Vector3d eval_limit_displacement(const BeamSolution& B, const Eigen::Vector3d& y);

// Full limit strain E(u,v,w) at y; micro derivatives come from the recovery
// modes of the axial quadrature point nearest to y1.
Eigen::Matrix3d eval_E(const BeamSolution& B, const Eigen::Vector3d& y);

// Strain of the recovered slice solution at one of the solver's quadrature
// points for a given macrostrain value.
Voigt6 cell_strain(const CellSolver& solver, const CellData& cell, int qp,
                   const Eigen::Vector4d& theta);

// Quadrature integrals of the solved limit fields (solver must be built on
// B.section).
double limit_energy(const BeamSolution& B, const CellSolver& solver,
                    const MaterialField& material);
double limit_load_work(const BeamSolution& B, const BeamLoads& loads);
double limit_prestrain_work(const BeamSolution& B, const CellSolver& solver,
                            const std::array<Expr, 6>& h);

// Cached evaluator for repeated E(u,v,w) queries at a fixed set of section
// points (the 3D comparison quadrature reuses the same y' values on every
// axial layer).
class LimitFieldCache {
  public:
    explicit LimitFieldCache(const BeamSolution& B);
    int register_point(const Eigen::Vector2d& yp);  // locate once, reuse
    Eigen::Matrix3d E_at(int handle, double y1) const;

  private:
    struct PointGeo {
        Eigen::Vector2d pos;
        int quad = 0;
        Eigen::Vector4d N;
        Eigen::Matrix<double, 4, 2> dN;
        Eigen::Matrix<double, 6, 4> macro;  // macro-mode strain 6-vectors
    };
    const BeamSolution& beam_;
    std::vector<PointGeo> points_;
};

}  // namespace patchbeam

#endif

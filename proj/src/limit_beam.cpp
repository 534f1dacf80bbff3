#include "patchbeam/limit_beam.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cmath>

#include "patchbeam/elements.hpp"
#include "patchbeam/errors.hpp"

namespace patchbeam {

namespace {

// 3-point Gauss on the unit interval.
constexpr double kGaussShift = 0.38729833462074168852;  // 0.5 * sqrt(3/5)
constexpr double kQpXi[3] = {0.5 - kGaussShift, 0.5, 0.5 + kGaussShift};
constexpr double kQpW[3] = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};

// Hermite cubic basis on an element of length h, local xi in [0,1]:
// (value-left, slope-left, value-right, slope-right).
struct HermiteBasis {
    Eigen::Vector4d v, d1, d2;
};

HermiteBasis hermite(double xi, double h) {
    HermiteBasis b;
    const double x2 = xi * xi, x3 = x2 * xi;
    b.v << 1 - 3 * x2 + 2 * x3, h * (xi - 2 * x2 + x3), 3 * x2 - 2 * x3, h * (x3 - x2);
    b.d1 << (-6 * xi + 6 * x2) / h, 1 - 4 * xi + 3 * x2, (6 * xi - 6 * x2) / h, 3 * x2 - 2 * xi;
    b.d2 << (-6 + 12 * xi) / (h * h), (-4 + 6 * xi) / h, (6 - 12 * xi) / (h * h), (6 * xi - 2) / h;
    return b;
}

// Quadratic Lagrange basis (left, middle, right).
struct QuadraticBasis {
    Eigen::Vector3d v, d1;
};

QuadraticBasis quadratic(double xi, double h) {
    QuadraticBasis b;
    b.v << 2 * xi * xi - 3 * xi + 1, 4 * xi - 4 * xi * xi, 2 * xi * xi - xi;
    b.d1 << (4 * xi - 3) / h, (4 - 8 * xi) / h, (4 * xi - 1) / h;
    return b;
}

struct Elem1D {
    int e = 0;
    double xi = 0.0;
};

Elem1D locate_1d(double y1, int n) {
    if (y1 < -1e-9 || y1 > 1.0 + 1e-9)
        throw MeshError("limit field evaluated outside the axial range [0,1]");
    const double t = std::clamp(y1, 0.0, 1.0) * n;
    int e = std::min(n - 1, static_cast<int>(t));
    return {e, t - e};
}

}  // namespace

double BeamGrid::qp_coord(int cell) const {
    return (cell / kQpPerElem + kQpXi[cell % kQpPerElem]) / n;
}

double BeamGrid::qp_weight_of(int cell) const { return h() * kQpW[cell % kQpPerElem]; }

std::array<int, 6> BeamGrid::trace_dofs() const {
    return {off_z2(), off_z3(), off_z1(), off_c(), off_z2() + 1, off_z3() + 1};
}

// ---------------------------------------------------------------------------
// CellSolver
// ---------------------------------------------------------------------------

struct CellSolver::Factorization {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool ready = false;
    VoigtMatrix tag = VoigtMatrix::Zero();  // material matrix the cache was built for
    Eigen::MatrixXd unit_modes;             // (3 Ns) x 4
    Eigen::Matrix4d D = Eigen::Matrix4d::Zero();
};

CellSolver::CellSolver(std::shared_ptr<const SectionMesh> section)
    : section_(std::move(section)), cache_(std::make_unique<Factorization>()) {
    const SectionMesh& S = *section_;
    qps_.reserve(S.quad_count() * 4);
    for (int q = 0; q < S.quad_count(); ++q) {
        Eigen::Matrix<double, 2, 4> P;
        for (int c = 0; c < 4; ++c) P.col(c) = S.nodes.col(S.quads(c, q));
        for (double gy : gauss2())
            for (double gx : gauss2()) {
                QuadPoint qp;
                qp.quad = q;
                qp.N = quad_shape(gx, gy);
                const auto gref = quad_shape_grad(gx, gy);
                const Eigen::Matrix2d J = P * gref;
                qp.w = J.determinant();
                qp.dN = gref * J.inverse();
                qp.pos = P * qp.N;
                qps_.push_back(qp);
            }
    }
}

CellSolver::~CellSolver() = default;
CellSolver::CellSolver(CellSolver&&) noexcept = default;
CellSolver& CellSolver::operator=(CellSolver&&) noexcept = default;

Voigt6 CellSolver::macro_mode(int mode, const Eigen::Vector2d& yp) {
    Voigt6 v = Voigt6::Zero();
    switch (mode) {
        case 0: v[0] = 1.0; break;          // extension: E11 = 1
        case 1: v[0] = -yp[0]; break;       // bending about y3: E11 = -y2
        case 2: v[0] = -yp[1]; break;       // bending about y2: E11 = -y3
        default:                            // torsion: 2E13 = -y2, 2E12 = y3
            v[4] = -yp[0];
            v[5] = yp[1];
    }
    return v;
}

namespace {

// Micro strain rows of one quad's (v1, w2, w3) dofs: columns are the 12 local
// dofs (3 per node), rows engineering Voigt.
Eigen::Matrix<double, 6, 12> micro_strain_matrix(const Eigen::Matrix<double, 4, 2>& dN) {
    Eigen::Matrix<double, 6, 12> B = Eigen::Matrix<double, 6, 12>::Zero();
    for (int a = 0; a < 4; ++a) {
        const int c = 3 * a;
        B(1, c + 1) = dN(a, 0);  // E22 = d2 w2
        B(2, c + 2) = dN(a, 1);  // E33 = d3 w3
        B(3, c + 1) = dN(a, 1);  // 2E23 = d3 w2 + d2 w3
        B(3, c + 2) = dN(a, 0);
        B(4, c + 0) = dN(a, 1);  // 2E13 = d3 v1 (+ macro)
        B(5, c + 0) = dN(a, 0);  // 2E12 = d2 v1 (+ macro)
    }
    return B;
}

Eigen::Matrix3d tensor_from_exprs(const std::array<Expr, 6>& h, const Eigen::Vector3d& y) {
    Voigt6 s;
    for (int k = 0; k < 6; ++k) s[k] = h[k](y);
    return voigt_to_stress(s);
}

}  // namespace

CellData CellSolver::solve(const MaterialField& material, double y1,
                           const std::array<Expr, 6>* h) const {
    const SectionMesh& S = *section_;
    const int ns = S.node_count();
    const int nm = 3 * ns;       // micro dofs
    const int ntot = nm + 4;     // + multipliers (v1 mean, w2 mean, w3 mean, w moment)
    const bool mat_uniform = material.axially_uniform();
    const VoigtMatrix tag = material.eval_tensor({mat_uniform ? 0.0 : y1, 0.0, 0.0});
    const bool cached = cache_->ready && mat_uniform && cache_->tag == tag;

    CellData cell;
    cell.y1 = y1;

    if (!cached) {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(qps_.size() * 160);
        Eigen::MatrixXd Kmt = Eigen::MatrixXd::Zero(nm, 4);
        for (const QuadPoint& qp : qps_) {
            const VoigtMatrix C = material.eval_tensor({y1, qp.pos[0], qp.pos[1]});
            const auto B = micro_strain_matrix(qp.dN);
            const Eigen::Matrix<double, 12, 12> Ke = qp.w * B.transpose() * C * B;
            Eigen::Matrix<double, 6, 4> L;
            for (int k = 0; k < 4; ++k) L.col(k) = macro_mode(k, qp.pos);
            const Eigen::Matrix<double, 12, 4> Km = qp.w * B.transpose() * C * L;
            for (int a = 0; a < 4; ++a) {
                const int ga = 3 * S.quads(a, qp.quad);
                for (int i = 0; i < 3; ++i) {
                    for (int bn = 0; bn < 4; ++bn) {
                        const int gb = 3 * S.quads(bn, qp.quad);
                        for (int j = 0; j < 3; ++j)
                            trips.emplace_back(ga + i, gb + j, Ke(3 * a + i, 3 * bn + j));
                    }
                    Kmt.row(ga + i) += Km.row(3 * a + i);
                }
            }
            // Gauge constraints: means of v1, w2, w3 and the w rotation moment.
            for (int a = 0; a < 4; ++a) {
                const int ga = 3 * S.quads(a, qp.quad);
                const double wN = qp.w * qp.N[a];
                trips.emplace_back(nm + 0, ga + 0, wN);
                trips.emplace_back(ga + 0, nm + 0, wN);
                trips.emplace_back(nm + 1, ga + 1, wN);
                trips.emplace_back(ga + 1, nm + 1, wN);
                trips.emplace_back(nm + 2, ga + 2, wN);
                trips.emplace_back(ga + 2, nm + 2, wN);
                trips.emplace_back(nm + 3, ga + 1, wN * qp.pos[1]);
                trips.emplace_back(ga + 1, nm + 3, wN * qp.pos[1]);
                trips.emplace_back(nm + 3, ga + 2, -wN * qp.pos[0]);
                trips.emplace_back(ga + 2, nm + 3, -wN * qp.pos[0]);
            }
        }
        Eigen::SparseMatrix<double> K(ntot, ntot);
        K.setFromTriplets(trips.begin(), trips.end());
        cache_->lu.compute(K);
        if (cache_->lu.info() != Eigen::Success)
            throw MeshError("cell solve: singular constrained section system");

        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ntot, 4);
        rhs.topRows(nm) = -Kmt;
        const Eigen::MatrixXd sol = cache_->lu.solve(rhs);
        cache_->unit_modes = sol.topRows(nm);
        cache_->tag = tag;
        cache_->ready = mat_uniform;

        // D from the optimal modes (Schur complement of the micro block).
        Eigen::Matrix4d D = Eigen::Matrix4d::Zero();
        for (const QuadPoint& qp : qps_) {
            const VoigtMatrix C = material.eval_tensor({y1, qp.pos[0], qp.pos[1]});
            const auto B = micro_strain_matrix(qp.dN);
            Eigen::Matrix<double, 12, 1> mloc[4];
            Eigen::Matrix<double, 6, 4> Ehat;
            for (int k = 0; k < 4; ++k) {
                for (int a = 0; a < 4; ++a)
                    mloc[k].segment<3>(3 * a) =
                        cache_->unit_modes.col(k).segment<3>(3 * S.quads(a, qp.quad));
                Ehat.col(k) = macro_mode(k, qp.pos) + B * mloc[k];
            }
            D.noalias() += qp.w * Ehat.transpose() * C * Ehat;
        }
        cache_->D = 0.5 * (D + D.transpose());
    }

    cell.D = cache_->D;
    cell.modes.setZero(nm, 5);
    cell.modes.leftCols<4>() = cache_->unit_modes;

    const bool has_h = h && !((*h)[0].is_zero() && (*h)[1].is_zero() && (*h)[2].is_zero() &&
                              (*h)[3].is_zero() && (*h)[4].is_zero() && (*h)[5].is_zero());
    if (has_h) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ntot);
        for (const QuadPoint& qp : qps_) {
            const Eigen::Matrix3d H = tensor_from_exprs(*h, {y1, qp.pos[0], qp.pos[1]});
            const Voigt6 s = stress_to_voigt(H);
            const Eigen::Matrix<double, 12, 1> le =
                qp.w * micro_strain_matrix(qp.dN).transpose() * s;
            for (int a = 0; a < 4; ++a)
                rhs.segment<3>(3 * S.quads(a, qp.quad)) += le.segment<3>(3 * a);
        }
        const Eigen::VectorXd sol = cache_->lu.solve(rhs);
        cell.modes.col(4) = sol.head(nm);

        // Condensed h-load g_l = int_S h : Ehat_l.
        for (const QuadPoint& qp : qps_) {
            const Voigt6 s = stress_to_voigt(tensor_from_exprs(*h, {y1, qp.pos[0], qp.pos[1]}));
            const auto B = micro_strain_matrix(qp.dN);
            for (int l = 0; l < 4; ++l) {
                Eigen::Matrix<double, 12, 1> mloc;
                for (int a = 0; a < 4; ++a)
                    mloc.segment<3>(3 * a) =
                        cell.modes.col(l).segment<3>(3 * S.quads(a, qp.quad));
                const Voigt6 Ehat = macro_mode(l, qp.pos) + B * mloc;
                cell.g[l] += qp.w * s.dot(Ehat);
            }
        }
    }
    return cell;
}

// ---------------------------------------------------------------------------
// Loads and 1D assembly
// ---------------------------------------------------------------------------

BeamLoads beam_loads(const std::array<Expr, 3>& f, const CellSolver& cells, const BeamGrid& grid) {
    BeamLoads loads(grid.cell_count(), Eigen::Matrix<double, 5, 1>::Zero());
    for (int cidx = 0; cidx < grid.cell_count(); ++cidx) {
        const double y1 = grid.qp_coord(cidx);
        Eigen::Matrix<double, 5, 1> v = Eigen::Matrix<double, 5, 1>::Zero();
        for (const auto& qp : cells.quad_points()) {
            const Eigen::Vector3d y(y1, qp.pos[0], qp.pos[1]);
            const double f1 = f[0](y);
            v[0] += qp.w * f1;                 // N
            v[1] += qp.w * f1 * qp.pos[0];     // M2
            v[2] += qp.w * f1 * qp.pos[1];     // M3
            v[3] += qp.w * f[1](y);            // Q2
            v[4] += qp.w * f[2](y);            // Q3
        }
        loads[cidx] = v;
    }
    return loads;
}

SparseSystem assemble_limit_system(const std::vector<CellData>& cells, const BeamLoads& loads,
                                   const BeamGrid& grid, const std::vector<int>& trace_constraints,
                                   const Eigen::Matrix<double, 6, 6>& penalty) {
    if (static_cast<int>(cells.size()) != grid.cell_count() || loads.size() != cells.size())
        throw std::invalid_argument("assemble_limit_system: cell/load count mismatch");
    for (int slot : trace_constraints)
        for (int i = 0; i < 6; ++i)
            if (penalty(slot, i) != 0.0 || penalty(i, slot) != 0.0)
                throw std::invalid_argument(
                    "assemble_limit_system: penalty acts on a constrained trace slot");

    const int n = grid.n;
    const double h = grid.h();
    SparseSystem sys;
    sys.n_dofs = grid.total();
    sys.b = Eigen::VectorXd::Zero(sys.n_dofs);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(n * 14 * 14 + 36);

    for (int e = 0; e < n; ++e) {
        std::array<int, 14> gdof;
        for (int k = 0; k < 4; ++k) {
            gdof[k] = grid.off_z2() + 2 * e + k;
            gdof[4 + k] = grid.off_z3() + 2 * e + k;
        }
        for (int k = 0; k < 3; ++k) {
            gdof[8 + k] = grid.off_z1() + 2 * e + k;
            gdof[11 + k] = grid.off_c() + 2 * e + k;
        }
        Eigen::Matrix<double, 14, 14> Ke = Eigen::Matrix<double, 14, 14>::Zero();
        Eigen::Matrix<double, 14, 1> fe = Eigen::Matrix<double, 14, 1>::Zero();
        for (int q = 0; q < BeamGrid::kQpPerElem; ++q) {
            const int cidx = e * BeamGrid::kQpPerElem + q;
            const double w = grid.qp_weight_of(cidx);
            const auto H = hermite(kQpXi[q], h);
            const auto P = quadratic(kQpXi[q], h);
            Eigen::Matrix<double, 4, 14> T = Eigen::Matrix<double, 4, 14>::Zero();
            T.block<1, 3>(0, 8) = P.d1.transpose();    // zeta1'
            T.block<1, 4>(1, 0) = H.d2.transpose();    // zeta2''
            T.block<1, 4>(2, 4) = H.d2.transpose();    // zeta3''
            T.block<1, 3>(3, 11) = P.d1.transpose();   // c'
            Ke.noalias() += w * T.transpose() * cells[cidx].D * T;
            fe.noalias() += w * T.transpose() * cells[cidx].g;
            const auto& ld = loads[cidx];
            fe.segment<3>(8) += w * ld[0] * P.v;                      // N zeta1
            fe.segment<4>(0) += w * (ld[3] * H.v - ld[1] * H.d1);     // Q2, -M2
            fe.segment<4>(4) += w * (ld[4] * H.v - ld[2] * H.d1);     // Q3, -M3
        }
        for (int i = 0; i < 14; ++i) {
            sys.b[gdof[i]] += fe[i];
            for (int j = 0; j < 14; ++j) trips.emplace_back(gdof[i], gdof[j], Ke(i, j));
        }
    }

    const auto tdofs = grid.trace_dofs();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (penalty(i, j) != 0.0) trips.emplace_back(tdofs[i], tdofs[j], penalty(i, j));

    sys.K.resize(sys.n_dofs, sys.n_dofs);
    sys.K.setFromTriplets(trips.begin(), trips.end());

    std::vector<int> fixed = {grid.off_z2() + 2 * n, grid.off_z2() + 2 * n + 1,
                              grid.off_z3() + 2 * n, grid.off_z3() + 2 * n + 1,
                              grid.off_z1() + 2 * n, grid.off_c() + 2 * n};
    for (int slot : trace_constraints) fixed.push_back(tdofs[slot]);
    std::sort(fixed.begin(), fixed.end());
    fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
    return impose_dirichlet_dofs(std::move(sys), fixed,
                                 Eigen::VectorXd::Zero(fixed.size()));
}

// ---------------------------------------------------------------------------
// solve_limit
// ---------------------------------------------------------------------------

BeamSolution solve_limit(const LimitProblem& problem, const RegimeSpec& regime,
                         const PenaltyForm* penalty) {
    if (penalty && penalty->regime != regime.tag)
        throw std::invalid_argument("solve_limit: penalty computed for a different regime");
    if (regime.critical() && !penalty)
        throw std::invalid_argument("solve_limit: critical regime needs its penalty form");

    CellSolver solver(problem.section);
    BeamGrid grid{problem.n_axial};

    const bool h_uniform = std::all_of(problem.h.begin(), problem.h.end(),
                                       [](const Expr& e) { return e.independent_of(0); });
    const bool share_cells = problem.material.axially_uniform() && h_uniform;

    std::vector<CellData> cells(grid.cell_count());
    if (share_cells) {
        const CellData proto = solver.solve(problem.material, grid.qp_coord(0), &problem.h);
        for (int c = 0; c < grid.cell_count(); ++c) {
            cells[c] = proto;
            cells[c].y1 = grid.qp_coord(c);
        }
    } else {
        for (int c = 0; c < grid.cell_count(); ++c)
            cells[c] = solver.solve(problem.material, grid.qp_coord(c), &problem.h);
    }

    const BeamLoads loads = beam_loads(problem.f, solver, grid);
    const Eigen::Matrix<double, 6, 6> P =
        penalty ? penalty->matrix : Eigen::Matrix<double, 6, 6>::Zero();
    SparseSystem sys = assemble_limit_system(cells, loads, grid, constraint_set(regime), P);

    // The 1D system is small; factor it directly.
    const Eigen::MatrixXd Kd = Eigen::MatrixXd(sys.K_red);
    Eigen::LLT<Eigen::MatrixXd> llt(Kd);
    if (llt.info() != Eigen::Success)
        throw SolveError("solve_limit: reduced 1D system is not positive definite", 0, 0);
    const Eigen::VectorXd x = llt.solve(sys.reduced_rhs());

    Eigen::VectorXd full = Eigen::VectorXd::Zero(sys.n_dofs);
    for (std::size_t k = 0; k < sys.free_dofs.size(); ++k) full[sys.free_dofs[k]] = x[k];

    BeamSolution B;
    B.grid = grid;
    B.section_shape = problem.section_shape;
    B.z2 = full.segment(grid.off_z2(), grid.n_hermite());
    B.z3 = full.segment(grid.off_z3(), grid.n_hermite());
    B.z1 = full.segment(grid.off_z1(), grid.n_lagrange());
    B.c = full.segment(grid.off_c(), grid.n_lagrange());
    B.section = problem.section;
    B.cells = std::move(cells);
    return B;
}

// ---------------------------------------------------------------------------
// BeamSolution evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_hermite(const Eigen::VectorXd& coef, double y1, int n, int deriv) {
    const auto [e, xi] = locate_1d(y1, n);
    const auto H = hermite(xi, 1.0 / n);
    const Eigen::Vector4d b = deriv == 0 ? H.v : (deriv == 1 ? H.d1 : H.d2);
    return coef.segment<4>(2 * e).dot(b);
}

double eval_quadratic(const Eigen::VectorXd& coef, double y1, int n, int deriv) {
    const auto [e, xi] = locate_1d(y1, n);
    const auto P = quadratic(xi, 1.0 / n);
    return coef.segment<3>(2 * e).dot(deriv == 0 ? P.v : P.d1);
}

}  // namespace

double BeamSolution::zeta1(double y1) const { return eval_quadratic(z1, y1, grid.n, 0); }
double BeamSolution::zeta1_prime(double y1) const { return eval_quadratic(z1, y1, grid.n, 1); }
double BeamSolution::zeta2(double y1) const { return eval_hermite(z2, y1, grid.n, 0); }
double BeamSolution::zeta2_prime(double y1) const { return eval_hermite(z2, y1, grid.n, 1); }
double BeamSolution::zeta2_pp(double y1) const { return eval_hermite(z2, y1, grid.n, 2); }
double BeamSolution::zeta3(double y1) const { return eval_hermite(z3, y1, grid.n, 0); }
double BeamSolution::zeta3_prime(double y1) const { return eval_hermite(z3, y1, grid.n, 1); }
double BeamSolution::zeta3_pp(double y1) const { return eval_hermite(z3, y1, grid.n, 2); }
double BeamSolution::twist(double y1) const { return eval_quadratic(c, y1, grid.n, 0); }
double BeamSolution::twist_prime(double y1) const { return eval_quadratic(c, y1, grid.n, 1); }

Eigen::Vector4d BeamSolution::theta(double y1) const {
    return {zeta1_prime(y1), zeta2_pp(y1), zeta3_pp(y1), twist_prime(y1)};
}

Eigen::Matrix<double, 6, 1> BeamSolution::trace() const {
    Eigen::Matrix<double, 6, 1> t;
    t << z2[0], z3[0], z1[0], c[0], z2[1], z3[1];
    return t;
}

int BeamSolution::nearest_cell(double y1) const {
    const auto [e, xi] = locate_1d(y1, grid.n);
    int best = 0;
    double dist = 1e300;
    for (int q = 0; q < BeamGrid::kQpPerElem; ++q) {
        const double d = std::abs(xi - kQpXi[q]);
        if (d < dist) {
            dist = d;
            best = q;
        }
    }
    return e * BeamGrid::kQpPerElem + best;
}

Eigen::Vector3d eval_limit_displacement(const BeamSolution& B, const Eigen::Vector3d& y) {
    if (!B.section_shape.contains(y.tail<2>(), 1.0, 1e-6))
        throw MeshError("eval_limit_displacement: point is outside the section");
    const double u1 = B.zeta1(y[0]) - B.zeta2_prime(y[0]) * y[1] - B.zeta3_prime(y[0]) * y[2];
    return {u1, B.zeta2(y[0]), B.zeta3(y[0])};
}

// ---------------------------------------------------------------------------
// Limit strain evaluation
// ---------------------------------------------------------------------------

LimitFieldCache::LimitFieldCache(const BeamSolution& B) : beam_(B) {
    if (!B.section || B.cells.empty())
        throw std::invalid_argument("LimitFieldCache: beam solution has no micro data");
}

int LimitFieldCache::register_point(const Eigen::Vector2d& yp) {
    const auto [quad, xi] = beam_.section->locate(yp);
    PointGeo g;
    g.pos = yp;
    g.quad = quad;
    g.N = quad_shape(xi[0], xi[1]);
    Eigen::Matrix<double, 2, 4> P;
    for (int c = 0; c < 4; ++c) P.col(c) = beam_.section->nodes.col(beam_.section->quads(c, quad));
    const auto gref = quad_shape_grad(xi[0], xi[1]);
    g.dN = gref * (P * gref).inverse();
    for (int k = 0; k < 4; ++k) g.macro.col(k) = CellSolver::macro_mode(k, yp);
    points_.push_back(g);
    return static_cast<int>(points_.size()) - 1;
}

Eigen::Matrix3d LimitFieldCache::E_at(int handle, double y1) const {
    const PointGeo& g = points_[handle];
    const Eigen::Vector4d th = beam_.theta(y1);
    const CellData& cell = beam_.cells[beam_.nearest_cell(y1)];

    // Combined micro field at the quad's nodes: unit modes weighted by the
    // macrostrain plus the h response.
    Eigen::Matrix<double, 12, 1> mloc;
    const auto& quads = beam_.section->quads;
    for (int a = 0; a < 4; ++a) {
        const int gn = 3 * quads(a, g.quad);
        mloc.segment<3>(3 * a) = cell.modes.block<3, 4>(gn, 0) * th + cell.modes.col(4).segment<3>(gn);
    }
    Voigt6 E = g.macro * th;
    for (int a = 0; a < 4; ++a) {
        const double v1 = mloc[3 * a], w2 = mloc[3 * a + 1], w3 = mloc[3 * a + 2];
        E[1] += g.dN(a, 0) * w2;
        E[2] += g.dN(a, 1) * w3;
        E[3] += g.dN(a, 1) * w2 + g.dN(a, 0) * w3;
        E[4] += g.dN(a, 1) * v1;
        E[5] += g.dN(a, 0) * v1;
    }
    return voigt_to_strain(E);
}

Eigen::Matrix3d eval_E(const BeamSolution& B, const Eigen::Vector3d& y) {
    if (!B.section_shape.contains(y.tail<2>(), 1.0, 1e-6))
        throw MeshError("eval_E: point is outside the section");
    LimitFieldCache cache(B);
    const int h = cache.register_point(y.tail<2>());
    return cache.E_at(h, y[0]);
}

Voigt6 cell_strain(const CellSolver& solver, const CellData& cell, int qp,
                   const Eigen::Vector4d& theta) {
    const auto& q = solver.quad_points()[qp];
    const auto& quads = solver.section().quads;
    Voigt6 E = Voigt6::Zero();
    for (int k = 0; k < 4; ++k) E += theta[k] * CellSolver::macro_mode(k, q.pos);
    for (int a = 0; a < 4; ++a) {
        const int gn = 3 * quads(a, q.quad);
        const Eigen::Vector3d m =
            cell.modes.block<3, 4>(gn, 0) * theta + cell.modes.col(4).segment<3>(gn);
        E[1] += q.dN(a, 0) * m[1];
        E[2] += q.dN(a, 1) * m[2];
        E[3] += q.dN(a, 1) * m[1] + q.dN(a, 0) * m[2];
        E[4] += q.dN(a, 1) * m[0];
        E[5] += q.dN(a, 0) * m[0];
    }
    return E;
}

double limit_energy(const BeamSolution& B, const CellSolver& solver,
                    const MaterialField& material) {
    double energy = 0.0;
    for (int cidx = 0; cidx < B.grid.cell_count(); ++cidx) {
        const double y1 = B.grid.qp_coord(cidx);
        const double w1 = B.grid.qp_weight_of(cidx);
        const Eigen::Vector4d th = B.theta(y1);
        for (int qp = 0; qp < static_cast<int>(solver.quad_points().size()); ++qp) {
            const auto& q = solver.quad_points()[qp];
            const VoigtMatrix C = material.eval_tensor({y1, q.pos[0], q.pos[1]});
            const Voigt6 E = cell_strain(solver, B.cells[cidx], qp, th);
            energy += w1 * q.w * E.dot(C * E);
        }
    }
    return energy;
}

double limit_load_work(const BeamSolution& B, const BeamLoads& loads) {
    double work = 0.0;
    for (int cidx = 0; cidx < B.grid.cell_count(); ++cidx) {
        const double y1 = B.grid.qp_coord(cidx);
        const double w1 = B.grid.qp_weight_of(cidx);
        const auto& ld = loads[cidx];
        work += w1 * (ld[0] * B.zeta1(y1) - ld[1] * B.zeta2_prime(y1) - ld[2] * B.zeta3_prime(y1) +
                      ld[3] * B.zeta2(y1) + ld[4] * B.zeta3(y1));
    }
    return work;
}

double limit_prestrain_work(const BeamSolution& B, const CellSolver& solver,
                            const std::array<Expr, 6>& h) {
    double work = 0.0;
    for (int cidx = 0; cidx < B.grid.cell_count(); ++cidx) {
        const double y1 = B.grid.qp_coord(cidx);
        const double w1 = B.grid.qp_weight_of(cidx);
        const Eigen::Vector4d th = B.theta(y1);
        for (int qp = 0; qp < static_cast<int>(solver.quad_points().size()); ++qp) {
            const auto& q = solver.quad_points()[qp];
            const Voigt6 s = stress_to_voigt(tensor_from_exprs(h, {y1, q.pos[0], q.pos[1]}));
            work += w1 * q.w * s.dot(cell_strain(solver, B.cells[cidx], qp, th));
        }
    }
    return work;
}

}  // namespace patchbeam

#include "patchbeam/fem.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "patchbeam/elements.hpp"
#include "patchbeam/errors.hpp"

namespace patchbeam {

Eigen::Vector3d material_point(MaterialFrame frame, const Eigen::Vector3d& x, double eps) {
    switch (frame) {
        case MaterialFrame::Identity: return x;
        case MaterialFrame::CylinderRescale: return {x[0], x[1] / eps, x[2] / eps};
        default: return Eigen::Vector3d::Zero();
    }
}

namespace {

// Strain-displacement matrix in engineering Voigt ordering (11,22,33,23,13,12)
// for one hex; dN holds the physical shape gradients (8 x 3).
Eigen::Matrix<double, 6, 24> strain_matrix(const Eigen::Matrix<double, 8, 3>& dN) {
    Eigen::Matrix<double, 6, 24> B = Eigen::Matrix<double, 6, 24>::Zero();
    for (int i = 0; i < 8; ++i) {
        const int c = 3 * i;
        B(0, c + 0) = dN(i, 0);
        B(1, c + 1) = dN(i, 1);
        B(2, c + 2) = dN(i, 2);
        B(3, c + 1) = dN(i, 2);
        B(3, c + 2) = dN(i, 1);
        B(4, c + 0) = dN(i, 2);
        B(4, c + 2) = dN(i, 0);
        B(5, c + 0) = dN(i, 1);
        B(5, c + 1) = dN(i, 0);
    }
    return B;
}

struct QuadPointGeo {
    Eigen::Matrix<double, 8, 3> dN;  // physical gradients
    Eigen::Matrix<double, 8, 1> N;
    double w = 0.0;  // detJ (unit Gauss weights)
    Eigen::Vector3d x;
};

// Geometry of the 8 Gauss points of one element.
std::array<QuadPointGeo, 8> element_geometry(const VolumeMesh& mesh, int e) {
    Eigen::Matrix<double, 3, 8> P;
    for (int c = 0; c < 8; ++c) P.col(c) = mesh.nodes.col(mesh.hexes(c, e));
    std::array<QuadPointGeo, 8> out;
    int q = 0;
    for (double gz : gauss2())
        for (double gy : gauss2())
            for (double gx : gauss2()) {
                const Eigen::Vector3d xi(gx, gy, gz);
                const auto gref = hex_shape_grad(xi);
                const Eigen::Matrix3d J = P * gref;
                const double det = J.determinant();
                QuadPointGeo& g = out[q++];
                g.dN = gref * J.inverse();
                g.N = hex_shape(xi);
                g.w = det;
                g.x = P * g.N;
            }
    return out;
}

}  // namespace

SparseSystem assemble_stiffness(const VolumeMesh& mesh, const MaterialField& material,
                                MaterialFrame frame) {
    const int n = 3 * mesh.node_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.elem_count()) * 24 * 24);

    const bool uniform = material.spatially_uniform() || frame == MaterialFrame::Frozen;
    const VoigtMatrix C0 = material.eval_tensor(
        material_point(frame, mesh.nodes.col(mesh.hexes(0, 0)), mesh.eps));

    for (int e = 0; e < mesh.elem_count(); ++e) {
        const auto geo = element_geometry(mesh, e);
        Eigen::Matrix<double, 24, 24> Ke = Eigen::Matrix<double, 24, 24>::Zero();
        for (const auto& g : geo) {
            const auto B = strain_matrix(g.dN);
            const VoigtMatrix C =
                uniform ? C0
                        : material.eval_tensor(material_point(frame, g.x, mesh.eps));
            Ke.noalias() += g.w * B.transpose() * C * B;
        }
        for (int a = 0; a < 8; ++a)
            for (int i = 0; i < 3; ++i) {
                const int row = 3 * mesh.hexes(a, e) + i;
                for (int bn = 0; bn < 8; ++bn)
                    for (int j = 0; j < 3; ++j)
                        trips.emplace_back(row, 3 * mesh.hexes(bn, e) + j, Ke(3 * a + i, 3 * bn + j));
            }
    }
    SparseSystem sys;
    sys.n_dofs = n;
    sys.K.resize(n, n);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    sys.b = Eigen::VectorXd::Zero(n);
    return sys;
}

Eigen::VectorXd assemble_body_load(const VolumeMesh& mesh, const VectorField& f, double eps,
                                   MaterialFrame frame) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(3 * mesh.node_count());
    for (int e = 0; e < mesh.elem_count(); ++e) {
        const auto geo = element_geometry(mesh, e);
        for (const auto& g : geo) {
            Eigen::Vector3d F = f(material_point(frame, g.x, eps));
            F[1] *= eps;
            F[2] *= eps;
            for (int a = 0; a < 8; ++a)
                load.segment<3>(3 * mesh.hexes(a, e)) += g.w * g.N[a] * F;
        }
    }
    return load;
}

Eigen::VectorXd assemble_prestrain_load(const VolumeMesh& mesh, const TensorField& h,
                                        MaterialFrame frame) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(3 * mesh.node_count());
    for (int e = 0; e < mesh.elem_count(); ++e) {
        const auto geo = element_geometry(mesh, e);
        for (const auto& g : geo) {
            const Eigen::Matrix3d H = h(material_point(frame, g.x, mesh.eps));
            if ((H - H.transpose()).cwiseAbs().maxCoeff() >
                1e-12 * (1.0 + H.cwiseAbs().maxCoeff()))
                throw MaterialError("prestrain field h must be symmetric");
            const Voigt6 s = stress_to_voigt(H);
            const Eigen::Matrix<double, 24, 1> le =
                strain_matrix(g.dN).transpose() * s * g.w;
            for (int a = 0; a < 8; ++a)
                load.segment<3>(3 * mesh.hexes(a, e)) += le.segment<3>(3 * a);
        }
    }
    return load;
}

SparseSystem impose_dirichlet(SparseSystem sys, const std::vector<int>& set,
                              const std::function<Eigen::Vector3d(int)>& values) {
    std::vector<int> dofs;
    Eigen::VectorXd vals(3 * set.size());
    dofs.reserve(3 * set.size());
    for (int node : set) {
        const Eigen::Vector3d v = values(node);
        for (int c = 0; c < 3; ++c) {
            vals[dofs.size()] = v[c];
            dofs.push_back(3 * node + c);
        }
    }
    return impose_dirichlet_dofs(std::move(sys), dofs, vals);
}

SparseSystem impose_dirichlet_dofs(SparseSystem sys, const std::vector<int>& dofs,
                                   const Eigen::VectorXd& values) {
    if (dofs.empty())
        throw SolveError("impose_dirichlet: empty constraint set leaves the system singular", 0, 0);
    if (sys.reduced) throw SolveError("impose_dirichlet: system already reduced", 0, 0);

    const int n = sys.n_dofs;
    std::vector<char> is_con(n, 0);
    Eigen::VectorXd g_full = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        is_con[dofs[k]] = 1;
        g_full[dofs[k]] = values[static_cast<Eigen::Index>(k)];
    }

    std::vector<int> map(n, -1);
    for (int d = 0; d < n; ++d) {
        if (is_con[d]) {
            map[d] = static_cast<int>(sys.constrained.size());
            sys.constrained.push_back(d);
        } else {
            map[d] = static_cast<int>(sys.free_dofs.size());
            sys.free_dofs.push_back(d);
        }
    }
    const int nf = static_cast<int>(sys.free_dofs.size());
    const int nc = static_cast<int>(sys.constrained.size());
    sys.constrained_values.resize(nc);
    for (int k = 0; k < nc; ++k) sys.constrained_values[k] = g_full[sys.constrained[k]];

    std::vector<Eigen::Triplet<double>> tf, tc;
    tf.reserve(sys.K.nonZeros());
    for (int r = 0; r < n; ++r) {
        if (is_con[r]) continue;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.K, r); it; ++it) {
            const int c = static_cast<int>(it.col());
            if (is_con[c])
                tc.emplace_back(map[r], map[c], it.value());
            else
                tf.emplace_back(map[r], map[c], it.value());
        }
    }
    sys.K_red.resize(nf, nf);
    sys.K_red.setFromTriplets(tf.begin(), tf.end());
    sys.K_fc.resize(nf, nc);
    sys.K_fc.setFromTriplets(tc.begin(), tc.end());
    sys.K.resize(0, 0);
    sys.K.data().squeeze();
    sys.reduced = true;
    return sys;
}

SparseSystem impose_dirichlet_zero(SparseSystem sys, const std::vector<int>& set) {
    return impose_dirichlet(std::move(sys), set,
                            [](int) { return Eigen::Vector3d::Zero(); });
}

Eigen::VectorXd SparseSystem::reduced_rhs() const { return reduced_rhs(constrained_values); }

Eigen::VectorXd SparseSystem::reduced_rhs(const Eigen::VectorXd& values) const {
    Eigen::VectorXd rhs(free_dofs.size());
    for (std::size_t k = 0; k < free_dofs.size(); ++k) rhs[k] = b[free_dofs[k]];
    if (values.size() > 0) rhs -= K_fc * values;
    return rhs;
}

DisplacementField solve_spd(const SparseSystem& sys, double tol, int maxit, SolveStats* stats,
                            const Eigen::VectorXd* constraint_values) {
    if (!sys.reduced) throw SolveError("solve_spd: system must be constrained first", 0, 0);
    const Eigen::VectorXd& g = constraint_values ? *constraint_values : sys.constrained_values;
    const Eigen::VectorXd rhs = sys.reduced_rhs(g);
    const int nf = static_cast<int>(rhs.size());

    DisplacementField U;
    U.values = Eigen::VectorXd::Zero(sys.n_dofs);
    for (std::size_t k = 0; k < sys.constrained.size(); ++k)
        U.values[sys.constrained[k]] = g[k];

    const double bnorm = rhs.norm();
    if (stats) *stats = {0, 0.0};
    if (bnorm == 0.0) return U;  // x = 0 in zero iterations

    Eigen::VectorXd diag = sys.K_red.diagonal();
    if ((diag.array() <= 0.0).any())
        throw SolveError("solve_spd: nonpositive diagonal, system is not SPD", 0, 0);
    const Eigen::ArrayXd inv_diag = 1.0 / diag.array();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(nf);
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd z = (r.array() * inv_diag).matrix();
    Eigen::VectorXd p = z;
    Eigen::VectorXd q(nf);
    double rho = r.dot(z);
    double res = r.norm() / bnorm;
    int it = 0;
    while (true) {
        while (res > tol) {
            if (it >= maxit)
                throw SolveError("solve_spd: no convergence within maxit", res, it);
            q.noalias() = sys.K_red * p;
            const double alpha = rho / p.dot(q);
            x += alpha * p;
            r -= alpha * q;
            res = r.norm() / bnorm;
            ++it;
            z = (r.array() * inv_diag).matrix();
            const double rho2 = r.dot(z);
            p = z + (rho2 / rho) * p;
            rho = rho2;
        }
        // The recurrence residual can drift over long runs; accept only the
        // true residual, otherwise restart from the current iterate.
        r = rhs - sys.K_red * x;
        res = r.norm() / bnorm;
        if (res <= tol) break;
        z = (r.array() * inv_diag).matrix();
        p = z;
        rho = r.dot(z);
    }
    if (stats) *stats = {it, res};
    for (int k = 0; k < nf; ++k) U.values[sys.free_dofs[k]] = x[k];
    return U;
}

StrainSamples strain_at_quadrature(const VolumeMesh& mesh, const DisplacementField& U) {
    StrainSamples s;
    const int ns = mesh.elem_count() * 8;
    s.eng.resize(6, ns);
    s.weight.resize(ns);
    s.pos.resize(3, ns);
    for (int e = 0; e < mesh.elem_count(); ++e) {
        Eigen::Matrix<double, 3, 8> Ue;
        for (int c = 0; c < 8; ++c) Ue.col(c) = U.values.segment<3>(3 * mesh.hexes(c, e));
        const auto geo = element_geometry(mesh, e);
        for (int q = 0; q < 8; ++q) {
            const Eigen::Matrix3d grad = Ue * geo[q].dN;  // grad(a,b) = dU_a/dx_b
            const Eigen::Matrix3d eps = 0.5 * (grad + grad.transpose());
            const int col = e * 8 + q;
            s.eng.col(col) = strain_to_voigt(eps);
            s.weight[col] = geo[q].w;
            s.pos.col(col) = geo[q].x;
        }
    }
    return s;
}

Eigen::Matrix3Xd displacement_at_quadrature(const VolumeMesh& mesh, const DisplacementField& U) {
    Eigen::Matrix3Xd out(3, mesh.elem_count() * 8);
    for (int e = 0; e < mesh.elem_count(); ++e) {
        Eigen::Matrix<double, 3, 8> Ue;
        for (int c = 0; c < 8; ++c) Ue.col(c) = U.values.segment<3>(3 * mesh.hexes(c, e));
        const auto geo = element_geometry(mesh, e);
        for (int q = 0; q < 8; ++q) out.col(e * 8 + q) = Ue * geo[q].N;
    }
    return out;
}

double quadratic_energy(const StrainSamples& samples, const MaterialField& material,
                        MaterialFrame frame, double eps) {
    const bool uniform = material.spatially_uniform() || frame == MaterialFrame::Frozen;
    const VoigtMatrix C0 = material.eval_tensor(
        frame == MaterialFrame::Frozen || samples.sample_count() == 0
            ? Eigen::Vector3d::Zero()
            : material_point(frame, samples.pos.col(0), eps));
    double energy = 0.0;
    for (int k = 0; k < samples.sample_count(); ++k) {
        const Voigt6 v = samples.eng.col(k);
        if (uniform) {
            energy += samples.weight[k] * v.dot(C0 * v);
        } else {
            const VoigtMatrix C = material.eval_tensor(material_point(frame, samples.pos.col(k), eps));
            energy += samples.weight[k] * v.dot(C * v);
        }
    }
    return energy;
}

Eigen::Vector3d eval_displacement(const VolumeMesh& mesh, const DisplacementField& U, int elem,
                                  const Eigen::Vector3d& xi) {
    Eigen::Matrix<double, 3, 8> Ue;
    for (int c = 0; c < 8; ++c) Ue.col(c) = U.values.segment<3>(3 * mesh.hexes(c, elem));
    return Ue * hex_shape(xi);
}

Eigen::Matrix3d eval_strain(const VolumeMesh& mesh, const DisplacementField& U, int elem,
                            const Eigen::Vector3d& xi) {
    Eigen::Matrix<double, 3, 8> P, Ue;
    for (int c = 0; c < 8; ++c) {
        P.col(c) = mesh.nodes.col(mesh.hexes(c, elem));
        Ue.col(c) = U.values.segment<3>(3 * mesh.hexes(c, elem));
    }
    const auto gref = hex_shape_grad(xi);
    const Eigen::Matrix3d J = P * gref;
    const Eigen::Matrix3d grad = Ue * (gref * J.inverse());
    return 0.5 * (grad + grad.transpose());
}

}  // namespace patchbeam

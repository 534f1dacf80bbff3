#include "patchbeam/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "patchbeam/elements.hpp"
#include "patchbeam/errors.hpp"

namespace patchbeam {

// ---------------------------------------------------------------------------
// SectionShape
// ---------------------------------------------------------------------------

void SectionShape::validate() const {
    if (kind == Kind::Disc) {
        if (!(radius > 0.0)) throw MeshError("disc radius must be positive");
    } else {
        if (!(a > 0.0 && b > 0.0)) throw MeshError("rectangle sides must be positive");
    }
}

double SectionShape::area() const {
    return kind == Kind::Disc ? M_PI * radius * radius : a * b;
}

double SectionShape::diameter() const {
    return kind == Kind::Disc ? 2.0 * radius : std::hypot(a, b);
}

double SectionShape::half_extent(int axis) const {
    if (kind == Kind::Disc) return radius;
    return axis == 0 ? 0.5 * a : 0.5 * b;
}

bool SectionShape::contains(const Eigen::Vector2d& p, double scale, double tol_rel) const {
    if (kind == Kind::Disc) {
        const double r = scale * radius;
        return p.norm() <= r * (1.0 + tol_rel) + tol_rel * scale;
    }
    const double ha = scale * 0.5 * a, hb = scale * 0.5 * b;
    const double ta = tol_rel * (ha + hb), tb = ta;
    return std::abs(p[0]) <= ha + ta && std::abs(p[1]) <= hb + tb;
}

// ---------------------------------------------------------------------------
// 1D coordinate arrays
// ---------------------------------------------------------------------------

std::vector<double> graded_line(double len, double h0, double ratio, double hcap) {
    if (!(len > 0.0) || !(h0 > 0.0) || !(hcap > 0.0) || ratio < 1.0)
        throw MeshError("graded_line: degenerate grading parameters");
    std::vector<double> pts{0.0};
    double h = std::min(h0, hcap);
    double pos = 0.0;
    while (true) {
        const double step = std::min(h, hcap);
        if (pos + step >= len - 0.45 * step) {
            pts.push_back(len);
            break;
        }
        pos += step;
        pts.push_back(pos);
        h *= ratio;
        if (pts.size() > 200000) throw MeshError("graded_line: too many layers");
    }
    return pts;
}

std::vector<double> symmetric_patch_line(double half, double patch_half, int n_patch,
                                         double ratio, double hcap) {
    if (!(patch_half > 0.0) || patch_half >= half)
        throw MeshError("symmetric_patch_line: patch does not fit inside the section");
    n_patch = std::max(1, n_patch);
    std::vector<double> pos;
    for (int i = 0; i <= n_patch; ++i) pos.push_back(patch_half * i / n_patch);
    const auto tail = graded_line(half - patch_half, (patch_half / n_patch) * ratio, ratio, hcap);
    for (std::size_t k = 1; k < tail.size(); ++k) pos.push_back(patch_half + tail[k]);
    std::vector<double> full;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) full.push_back(-*it);
    for (std::size_t k = 1; k < pos.size(); ++k) full.push_back(pos[k]);
    return full;
}

namespace {

std::vector<double> uniform_line(double lo, double hi, int n) {
    std::vector<double> pts(n + 1);
    for (int i = 0; i <= n; ++i) pts[i] = lo + (hi - lo) * i / n;
    return pts;
}

// ---------------------------------------------------------------------------
// Quad meshes: tensor grids and blended-ring discs
// ---------------------------------------------------------------------------

SectionMesh tensor_section(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int nx = static_cast<int>(xs.size()) - 1;
    const int ny = static_cast<int>(ys.size()) - 1;
    SectionMesh m;
    m.nodes.resize(2, (nx + 1) * (ny + 1));
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j) m.nodes.col(i * (ny + 1) + j) = Eigen::Vector2d(xs[i], ys[j]);
    m.quads.resize(4, nx * ny);
    int q = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const int n00 = i * (ny + 1) + j;
            m.quads.col(q++) << n00, n00 + (ny + 1), n00 + (ny + 1) + 1, n00 + 1;
        }
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            if (i == 0 || i == nx || j == 0 || j == ny) m.boundary.push_back(i * (ny + 1) + j);
    m.finalize();
    return m;
}

struct RingSpec {
    double rho;     // nominal radius
    double lambda;  // 0: inner-square shape, 1: circle
    double mu;      // 0: circle, 1: outer square of half-width rho
};

// Core square of half-width s (n x n quads) surrounded by rings of quads.
// Ring node on the ray through core boundary node p sits at distance
//   rho * ((1-lambda) q + lambda) * ((1-mu) + mu q),   q = |p| / s in [1, sqrt2].
SectionMesh blended_disc(double s, int n, const std::vector<RingSpec>& rings) {
    if (!(s > 0.0) || n < 2) throw MeshError("blended_disc: bad core parameters");
    SectionMesh m;
    const int core_nodes = (n + 1) * (n + 1);
    const int ring_count = static_cast<int>(rings.size());
    const int rays = 4 * n;
    m.nodes.resize(2, core_nodes + ring_count * rays);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            m.nodes.col(i * (n + 1) + j) =
                Eigen::Vector2d(-s + 2.0 * s * i / n, -s + 2.0 * s * j / n);

    std::vector<int> walk;  // CCW core boundary starting at (s, -s)
    walk.reserve(rays);
    for (int j = 0; j < n; ++j) walk.push_back(n * (n + 1) + j);
    for (int i = n; i > 0; --i) walk.push_back(i * (n + 1) + n);
    for (int j = n; j > 0; --j) walk.push_back(j);
    for (int i = 0; i < n; ++i) walk.push_back(i * (n + 1));

    Eigen::Matrix2Xd dirs(2, rays);
    Eigen::VectorXd qfac(rays);
    for (int r = 0; r < rays; ++r) {
        const Eigen::Vector2d p = m.nodes.col(walk[r]);
        const double len = p.norm();
        dirs.col(r) = p / len;
        qfac[r] = len / s;
    }

    m.quads.resize(4, n * n + ring_count * rays);
    int q = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int n00 = i * (n + 1) + j;
            m.quads.col(q++) << n00, n00 + (n + 1), n00 + (n + 1) + 1, n00 + 1;
        }

    std::vector<int> prev = walk, cur(rays);
    for (int k = 0; k < ring_count; ++k) {
        const RingSpec& rs = rings[k];
        for (int r = 0; r < rays; ++r) {
            const double d = rs.rho * ((1.0 - rs.lambda) * qfac[r] + rs.lambda) *
                             ((1.0 - rs.mu) + rs.mu * qfac[r]);
            const int id = core_nodes + k * rays + r;
            m.nodes.col(id) = dirs.col(r) * d;
            cur[r] = id;
        }
        for (int r = 0; r < rays; ++r) {
            const int r1 = (r + 1) % rays;
            m.quads.col(q++) << prev[r], cur[r], cur[r1], prev[r1];
        }
        prev = cur;
    }
    m.boundary = prev;
    m.finalize();
    return m;
}

std::vector<RingSpec> circle_transition(double s, double target_r, int steps) {
    std::vector<RingSpec> rings;
    for (int j = 1; j <= steps; ++j)
        rings.push_back({s + (target_r - s) * j / steps, double(j) / steps, 0.0});
    return rings;
}

int rays_for_spacing(double radius, double h) {
    return std::max(3, static_cast<int>(std::ceil(M_PI * radius / (2.0 * h))));
}

}  // namespace

SectionMesh build_section_mesh(const SectionShape& shape, double h) {
    shape.validate();
    if (!(h > 0.0)) throw MeshError("build_section_mesh: target size must be positive");
    if (shape.kind == SectionShape::Kind::Rect) {
        const int na = std::max(1, static_cast<int>(std::ceil(shape.a / h - 1e-9)));
        const int nb = std::max(1, static_cast<int>(std::ceil(shape.b / h - 1e-9)));
        return tensor_section(uniform_line(-0.5 * shape.a, 0.5 * shape.a, na),
                              uniform_line(-0.5 * shape.b, 0.5 * shape.b, nb));
    }
    const double R = shape.radius;
    const double s = 0.35 * R;
    const int n = rays_for_spacing(R, h);
    const int K = std::max(2, static_cast<int>(std::llround((R - s) / h)));
    const int jc = std::max(2, K / 2);
    std::vector<RingSpec> rings;
    for (int j = 1; j <= K; ++j)
        rings.push_back({s + (R - s) * j / K, std::min(1.0, double(j) / jc), 0.0});
    return blended_disc(s, n, rings);
}

SectionMesh build_cylinder_section(const SectionSpec& spec, double r_eps, double h,
                                   const GradingParams& grading) {
    spec.outer.validate();
    spec.patch.validate();
    if (!(r_eps > 0.0)) throw MeshError("build_cylinder_section: r_eps must be positive");
    if (spec.outer.kind != spec.patch.kind)
        throw MeshError("build_cylinder_section: mixed disc/rect section-patch pairs are not supported");

    if (spec.outer.kind == SectionShape::Kind::Rect) {
        const double pa = r_eps * 0.5 * spec.patch.a, pb = r_eps * 0.5 * spec.patch.b;
        if (pa >= 0.5 * spec.outer.a || pb >= 0.5 * spec.outer.b)
            throw MeshError("build_cylinder_section: patch is not inside the section");
        return tensor_section(
            symmetric_patch_line(0.5 * spec.outer.a, pa, grading.patch_divisions, grading.ratio, h),
            symmetric_patch_line(0.5 * spec.outer.b, pb, grading.patch_divisions, grading.ratio, h));
    }

    const double R = spec.outer.radius;
    const double p = r_eps * spec.patch.radius;
    if (p >= R) throw MeshError("build_cylinder_section: patch is not inside the section");
    const double s = 0.4 * p;
    const int n = std::max(std::max(2, grading.patch_divisions), rays_for_spacing(R, h));
    auto rings = circle_transition(s, p, 4);
    double rho = p;
    while (true) {
        const double step = std::min(rho * (grading.ratio - 1.0), h);
        if (rho + step >= R - 0.45 * step) {
            rings.push_back({R, 1.0, 0.0});
            break;
        }
        rho += step;
        rings.push_back({rho, 1.0, 0.0});
        if (rings.size() > 100000) throw MeshError("build_cylinder_section: grading stalls");
    }
    return blended_disc(s, n, rings);
}

// ---------------------------------------------------------------------------
// SectionMesh
// ---------------------------------------------------------------------------

void SectionMesh::finalize() {
    const int nq = quad_count();
    bbox_min.resize(2, nq);
    bbox_max.resize(2, nq);
    for (int q = 0; q < nq; ++q) {
        Eigen::Matrix<double, 2, 4> P;
        for (int c = 0; c < 4; ++c) P.col(c) = nodes.col(quads(c, q));
        bbox_min.col(q) = P.rowwise().minCoeff();
        bbox_max.col(q) = P.rowwise().maxCoeff();
        for (double gx : gauss2())
            for (double gy : gauss2()) {
                const Eigen::Matrix2d J = P * quad_shape_grad(gx, gy);
                if (!(J.determinant() > 0.0))
                    throw MeshError("section mesh has a non-positive Jacobian");
            }
    }
}

double SectionMesh::area() const {
    double a = 0.0;
    for (int q = 0; q < quad_count(); ++q) {
        Eigen::Matrix<double, 2, 4> P;
        for (int c = 0; c < 4; ++c) P.col(c) = nodes.col(quads(c, q));
        for (double gx : gauss2())
            for (double gy : gauss2()) a += (P * quad_shape_grad(gx, gy)).determinant();
    }
    return a;
}

std::pair<int, Eigen::Vector2d> SectionMesh::locate(const Eigen::Vector2d& p) const {
    const double scale = (bbox_max.rowwise().maxCoeff() - bbox_min.rowwise().minCoeff()).norm();
    const double margin = 1e-9 * scale;
    int best_q = -1;
    Eigen::Vector2d best_xi;
    double best_excess = 1e300;
    for (int q = 0; q < quad_count(); ++q) {
        if ((p.array() < bbox_min.col(q).array() - margin).any() ||
            (p.array() > bbox_max.col(q).array() + margin).any())
            continue;
        Eigen::Matrix<double, 2, 4> P;
        for (int c = 0; c < 4; ++c) P.col(c) = nodes.col(quads(c, q));
        Eigen::Vector2d xi = Eigen::Vector2d::Zero();
        bool ok = false;
        for (int it = 0; it < 40; ++it) {
            const Eigen::Vector2d r = P * quad_shape(xi[0], xi[1]) - p;
            if (r.norm() < 1e-13 * scale) {
                ok = true;
                break;
            }
            const Eigen::Matrix2d J = P * quad_shape_grad(xi[0], xi[1]);
            xi -= J.inverse() * r;
            if (!xi.allFinite() || xi.cwiseAbs().maxCoeff() > 4.0) break;
        }
        if (!ok) continue;
        const double excess = std::max(0.0, xi.cwiseAbs().maxCoeff() - 1.0);
        if (excess < best_excess) {
            best_excess = excess;
            best_q = q;
            best_xi = xi;
        }
        if (excess == 0.0) break;
    }
    if (best_q < 0 || best_excess > 1e-6)
        throw MeshError("locate: point is outside the section mesh");
    return {best_q, best_xi};
}

// ---------------------------------------------------------------------------
// VolumeMesh
// ---------------------------------------------------------------------------

namespace {

VolumeMesh extrude(SectionMesh section, const std::vector<double>& axial, double scale,
                   MeshKind kind) {
    VolumeMesh m;
    m.kind = kind;
    m.section = std::move(section);
    m.section_scale = scale;
    m.axial = Eigen::Map<const Eigen::VectorXd>(axial.data(), axial.size());
    const int ns = m.section.node_count();
    const int nq = m.section.quad_count();
    const int layers = static_cast<int>(axial.size());
    m.nodes.resize(3, layers * ns);
    for (int k = 0; k < layers; ++k)
        for (int i = 0; i < ns; ++i) {
            m.nodes.col(k * ns + i) << axial[k], scale * m.section.nodes(0, i),
                scale * m.section.nodes(1, i);
        }
    m.hexes.resize(8, (layers - 1) * nq);
    for (int k = 0; k + 1 < layers; ++k)
        for (int q = 0; q < nq; ++q) {
            auto col = m.hexes.col(k * nq + q);
            for (int c = 0; c < 4; ++c) {
                col[c] = k * ns + m.section.quads(c, q);
                col[4 + c] = (k + 1) * ns + m.section.quads(c, q);
            }
        }
    return m;
}

}  // namespace

void VolumeMesh::finalize() {
    const int ne = elem_count();
    bbox_min.resize(3, ne);
    bbox_max.resize(3, ne);
    for (int e = 0; e < ne; ++e) {
        Eigen::Matrix<double, 3, 8> P;
        for (int c = 0; c < 8; ++c) P.col(c) = nodes.col(hexes(c, e));
        bbox_min.col(e) = P.rowwise().minCoeff();
        bbox_max.col(e) = P.rowwise().maxCoeff();
        for (double gx : gauss2())
            for (double gy : gauss2())
                for (double gz : gauss2()) {
                    const Eigen::Matrix3d J = P * hex_shape_grad({gx, gy, gz});
                    if (!(J.determinant() > 0.0))
                        throw MeshError("volume mesh has a non-positive Jacobian");
                }
    }
}

double VolumeMesh::volume() const {
    double v = 0.0;
    for (int e = 0; e < elem_count(); ++e) {
        Eigen::Matrix<double, 3, 8> P;
        for (int c = 0; c < 8; ++c) P.col(c) = nodes.col(hexes(c, e));
        for (double gx : gauss2())
            for (double gy : gauss2())
                for (double gz : gauss2()) v += (P * hex_shape_grad({gx, gy, gz})).determinant();
    }
    return v;
}

std::pair<int, Eigen::Vector3d> VolumeMesh::locate(const Eigen::Vector3d& p) const {
    const double scale = (bbox_max.rowwise().maxCoeff() - bbox_min.rowwise().minCoeff()).norm();
    const double margin = 1e-9 * scale;
    int best_e = -1;
    Eigen::Vector3d best_xi;
    double best_excess = 1e300;
    for (int e = 0; e < elem_count(); ++e) {
        if ((p.array() < bbox_min.col(e).array() - margin).any() ||
            (p.array() > bbox_max.col(e).array() + margin).any())
            continue;
        Eigen::Matrix<double, 3, 8> P;
        for (int c = 0; c < 8; ++c) P.col(c) = nodes.col(hexes(c, e));
        Eigen::Vector3d xi = Eigen::Vector3d::Zero();
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            const Eigen::Vector3d r = P * hex_shape(xi) - p;
            if (r.norm() < 1e-13 * scale) {
                ok = true;
                break;
            }
            const Eigen::Matrix3d J = P * hex_shape_grad(xi);
            xi -= J.inverse() * r;
            if (!xi.allFinite() || xi.cwiseAbs().maxCoeff() > 4.0) break;
        }
        if (!ok) continue;
        const double excess = std::max(0.0, xi.cwiseAbs().maxCoeff() - 1.0);
        if (excess < best_excess) {
            best_excess = excess;
            best_e = e;
            best_xi = xi;
        }
        if (excess == 0.0) break;
    }
    if (best_e < 0 || best_excess > 1e-6)
        throw MeshError("locate: point is outside the volume mesh");
    return {best_e, best_xi};
}

void VolumeMesh::dump(std::ostream& os) const {
    os << "patchbeam-mesh 1 " << node_count() << ' ' << elem_count() << '\n';
    for (int i = 0; i < node_count(); ++i)
        os << nodes(0, i) << ' ' << nodes(1, i) << ' ' << nodes(2, i) << '\n';
    for (int e = 0; e < elem_count(); ++e) {
        for (int c = 0; c < 8; ++c) os << hexes(c, e) << (c == 7 ? '\n' : ' ');
    }
}

// ---------------------------------------------------------------------------
// Volume builders
// ---------------------------------------------------------------------------

VolumeMesh build_cylinder_mesh(const SectionSpec& spec, double eps, double r_eps, int axial_n,
                               double section_h, const GradingParams& grading) {
    if (!(eps > 0.0) || !(r_eps > 0.0))
        throw MeshError("build_cylinder_mesh: eps and r_eps must be positive");
    if (axial_n < 4) throw MeshError("build_cylinder_mesh: axial_n must be at least 4");

    SectionMesh sec = build_cylinder_section(spec, r_eps, section_h, grading);

    const double hmax = 1.0 / axial_n;
    const double h0 = eps * r_eps * spec.patch.diameter() * 0.5;
    const auto axial = graded_line(1.0, std::min(h0, hmax), grading.ratio, hmax);

    VolumeMesh m = extrude(std::move(sec), axial, eps, MeshKind::Cylinder);
    m.eps = eps;
    m.r_eps = r_eps;

    const int ns = m.section.node_count();
    const int layers = static_cast<int>(m.axial.size());
    for (int i = 0; i < ns; ++i) {
        if (spec.patch.contains(m.section.nodes.col(i) / r_eps, 1.0)) m.gamma0.push_back(i);
        m.gamma1.push_back((layers - 1) * ns + i);
    }
    if (m.gamma0.empty()) throw MeshError("build_cylinder_mesh: empty clamp patch");
    m.finalize();
    return m;
}

VolumeMesh build_box_mesh(double lx, double ly, double lz, int nx, int ny, int nz) {
    SectionMesh sec = tensor_section(uniform_line(-0.5 * ly, 0.5 * ly, ny),
                                     uniform_line(-0.5 * lz, 0.5 * lz, nz));
    VolumeMesh m = extrude(std::move(sec), uniform_line(0.0, lx, nx), 1.0, MeshKind::Generic);
    m.finalize();
    return m;
}

VolumeMesh build_halfbox_mesh(const SectionShape& s0, double L, const HalfboxParams& params) {
    s0.validate();
    if (!(L >= 4.0 * s0.diameter()))
        throw MeshError("build_halfbox_mesh: truncation length below 4 * diam(S0)");

    const double w = std::max(s0.half_extent(0), s0.half_extent(1));
    const double core_h = params.core_h_rel * w;
    const double far_cap = L / 5.0;

    SectionMesh sec;
    if (s0.kind == SectionShape::Kind::Rect) {
        sec = tensor_section(
            symmetric_patch_line(L, 0.5 * s0.a, std::max(3, int(std::llround(0.5 * s0.a / core_h))),
                                 params.ratio, far_cap),
            symmetric_patch_line(L, 0.5 * s0.b, std::max(3, int(std::llround(0.5 * s0.b / core_h))),
                                 params.ratio, far_cap));
    } else {
        const double R0 = s0.radius;
        const double s = 0.4 * R0;
        const int n = std::max(3, rays_for_spacing(R0, core_h));
        const int k_in = std::max(3, static_cast<int>(std::llround((R0 - s) / core_h)));
        auto rings = circle_transition(s, R0, k_in);
        // Geometric growth outward; blend the rings back into the box square
        // over the outer 45% of the radius so the final ring is (-L,L)^2.
        const double blend_start = 0.55 * L;
        double rho = R0;
        while (true) {
            const double step = std::min(rho * (params.ratio - 1.0), far_cap);
            const bool last = rho + step >= L - 0.45 * step;
            rho = last ? L : rho + step;
            const double mu =
                std::clamp((rho - blend_start) / (L - blend_start), 0.0, last ? 1.0 : 0.98);
            rings.push_back({rho, 1.0, last ? 1.0 : mu});
            if (last) break;
            if (rings.size() > 100000) throw MeshError("build_halfbox_mesh: grading stalls");
        }
        sec = blended_disc(s, n, rings);
    }

    const auto axial = graded_line(L, core_h, params.ratio, far_cap);
    VolumeMesh m = extrude(std::move(sec), axial, 1.0, MeshKind::Halfbox);
    m.L = L;

    const int ns = m.section.node_count();
    const int layers = static_cast<int>(m.axial.size());
    const double tol = 1e-9 * L;
    for (int i = 0; i < ns; ++i)
        if (s0.contains(m.section.nodes.col(i), 1.0)) m.patch.push_back(i);
    for (int k = 0; k < layers; ++k) {
        const bool far_layer = k == layers - 1;
        for (int i = 0; i < ns; ++i) {
            const Eigen::Vector2d p = m.section.nodes.col(i);
            if (far_layer || p.cwiseAbs().maxCoeff() >= L - tol) m.farfield.push_back(k * ns + i);
        }
    }
    if (m.patch.empty()) throw MeshError("build_halfbox_mesh: empty patch set");
    m.finalize();
    return m;
}

}  // namespace patchbeam

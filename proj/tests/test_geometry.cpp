#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "patchbeam/elements.hpp"
#include "patchbeam/errors.hpp"
#include "patchbeam/geometry.hpp"

using namespace patchbeam;

TEST_CASE("graded 1D line") {
    const auto pts = graded_line(1.0, 0.01, 1.3, 0.1);
    CHECK(pts.front() == 0.0);
    CHECK(pts.back() == 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
    // spacing grows by at most the ratio and never beyond the cap
    for (std::size_t i = 2; i < pts.size(); ++i) {
        const double h0 = pts[i - 1] - pts[i - 2], h1 = pts[i] - pts[i - 1];
        CHECK(h1 <= 1.3 * h0 * 1.5 + 1e-12);
        CHECK(h1 <= 0.1 + 0.05);  // cap, with the end-snap slack
    }
    CHECK_THROWS_AS(graded_line(1.0, 0.0, 1.3, 0.1), MeshError);
    CHECK_THROWS_AS(graded_line(1.0, 0.01, 0.5, 0.1), MeshError);
}

TEST_CASE("symmetric patch line hits the patch edge exactly") {
    const auto pts = symmetric_patch_line(0.5, 0.05, 4, 1.3, 0.2);
    CHECK(pts.front() == doctest::Approx(-0.5));
    CHECK(pts.back() == doctest::Approx(0.5));
    bool has_edge = false, has_neg_edge = false;
    for (double p : pts) {
        if (p == doctest::Approx(0.05).epsilon(1e-14)) has_edge = true;
        if (p == doctest::Approx(-0.05).epsilon(1e-14)) has_neg_edge = true;
    }
    CHECK(has_edge);
    CHECK(has_neg_edge);
    CHECK_THROWS_AS(symmetric_patch_line(0.5, 0.6, 4, 1.3, 0.2), MeshError);
}

TEST_CASE("unit square section: exact structured grid") {
    const auto m = build_section_mesh(SectionShape::rect(1.0, 1.0), 0.25);
    CHECK(m.quad_count() == 16);
    CHECK(m.area() == doctest::Approx(1.0).epsilon(1e-14));
    const auto m2 = build_section_mesh(SectionShape::rect(2.0, 1.0), 0.5);
    CHECK(m2.area() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("unit disc section: area within 1% at h=0.05") {
    const auto m = build_section_mesh(SectionShape::disc(1.0), 0.05);
    CHECK(std::abs(m.area() - M_PI) / M_PI < 0.01);
    // boundary nodes sit on the circle
    for (int id : m.boundary) CHECK(m.nodes.col(id).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate section specs are rejected") {
    CHECK_THROWS_AS(build_section_mesh(SectionShape::disc(-1.0), 0.1), MeshError);
    CHECK_THROWS_AS(build_section_mesh(SectionShape::rect(0.0, 1.0), 0.1), MeshError);
    CHECK_THROWS_AS(build_section_mesh(SectionShape::disc(1.0), 0.0), MeshError);
}

TEST_CASE("section locate: Newton inversion of the bilinear map") {
    const auto m = build_section_mesh(SectionShape::disc(1.0), 0.1);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-0.7, 0.7);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector2d p(d(rng), d(rng));
        const auto [quad, xi] = m.locate(p);
        Eigen::Matrix<double, 2, 4> P;
        for (int c = 0; c < 4; ++c) P.col(c) = m.nodes.col(m.quads(c, quad));
        const Eigen::Vector2d back = P * quad_shape(xi[0], xi[1]);
        CHECK((back - p).norm() < 1e-10);
        CHECK(xi.cwiseAbs().maxCoeff() <= 1.0 + 1e-8);
    }
    CHECK_THROWS_AS(m.locate({2.0, 0.0}), MeshError);
}

TEST_CASE("cylinder mesh: sets and volume") {
    SectionSpec spec{SectionShape::disc(1.0), SectionShape::disc(1.0)};
    const double eps = 0.1, r_eps = 0.01;
    const auto m = build_cylinder_mesh(spec, eps, r_eps, 8, 0.25, {1.3, 4});

    CHECK(m.kind == MeshKind::Cylinder);
    CHECK_FALSE(m.gamma0.empty());
    // gamma0: x1 = 0 and |x'| <= eps r_eps (patch radius 0.001)
    for (int id : m.gamma0) {
        CHECK(m.nodes(0, id) == 0.0);
        CHECK(m.nodes.col(id).tail<2>().norm() <= eps * r_eps * (1 + 1e-9));
    }
    for (int id : m.gamma1) CHECK(m.nodes(0, id) == doctest::Approx(1.0));
    // all nodes inside the scaled section
    for (int i = 0; i < m.node_count(); ++i)
        CHECK(m.nodes.col(i).tail<2>().norm() <= eps * (1 + 1e-9));
    // |Omega^eps| = eps^2 |S|
    CHECK(std::abs(m.volume() - eps * eps * M_PI) / (eps * eps * M_PI) < 0.01);

    // gamma0 and gamma1 are disjoint subsets of the boundary
    std::set<int> g0(m.gamma0.begin(), m.gamma0.end());
    for (int id : m.gamma1) CHECK(g0.count(id) == 0);
}

TEST_CASE("cylinder mesh: patch ring resolved") {
    SectionSpec spec{SectionShape::disc(1.0), SectionShape::disc(1.0)};
    const double eps = 0.1, r_eps = 0.05;
    const auto m = build_cylinder_mesh(spec, eps, r_eps, 8, 0.25, {1.3, 4});
    // nodes exactly on the patch circle (at least 8 around it)
    int on_ring = 0;
    for (int id : m.gamma0)
        if (m.nodes.col(id).tail<2>().norm() > eps * r_eps * (1 - 1e-9)) ++on_ring;
    CHECK(on_ring >= 8);
    // first axial layer height is of order eps * r_eps
    CHECK(m.axial[1] <= eps * r_eps * 1.5);
}

TEST_CASE("cylinder rejects a patch that does not fit") {
    SectionSpec spec{SectionShape::disc(1.0), SectionShape::disc(1.0)};
    CHECK_THROWS_AS(build_cylinder_mesh(spec, 0.1, 1.5, 8, 0.25, {1.3, 4}), MeshError);
    CHECK_THROWS_AS(build_cylinder_mesh(spec, 0.1, 0.01, 3, 0.25, {1.3, 4}), MeshError);
}

TEST_CASE("rect cylinder mesh") {
    SectionSpec spec{SectionShape::rect(1.0, 1.0), SectionShape::rect(1.0, 1.0)};
    const auto m = build_cylinder_mesh(spec, 0.1, 0.1, 8, 0.25, {1.3, 2});
    CHECK(std::abs(m.volume() - 0.01) / 0.01 < 1e-12);
    for (int id : m.gamma0) {
        CHECK(m.nodes(0, id) == 0.0);
        CHECK(m.nodes.col(id).tail<2>().cwiseAbs().maxCoeff() <= 0.1 * 0.1 * 0.5 * (1 + 1e-9));
    }
}

TEST_CASE("halfbox mesh: patch and farfield sets") {
    const auto m = build_halfbox_mesh(SectionShape::disc(1.0), 8.0, {0.25, 1.4});
    CHECK(m.kind == MeshKind::Halfbox);
    CHECK_FALSE(m.patch.empty());
    for (int id : m.patch) {
        CHECK(m.nodes(0, id) == 0.0);
        CHECK(m.nodes.col(id).tail<2>().norm() <= 1.0 + 1e-9);
    }
    std::set<int> patch(m.patch.begin(), m.patch.end());
    for (int id : m.farfield) {
        CHECK(patch.count(id) == 0);
        const Eigen::Vector3d x = m.nodes.col(id);
        const bool far = x[0] >= 8.0 - 1e-6 || std::abs(x[1]) >= 8.0 - 1e-6 ||
                         std::abs(x[2]) >= 8.0 - 1e-6;
        CHECK(far);
    }
    // outer boundary reaches the box corners
    CHECK(m.nodes.row(1).maxCoeff() == doctest::Approx(8.0));
    CHECK(m.nodes.row(2).minCoeff() == doctest::Approx(-8.0));
    CHECK_THROWS_AS(build_halfbox_mesh(SectionShape::disc(1.0), 4.0, {0.25, 1.4}), MeshError);
}

TEST_CASE("halfbox node count grows by a bounded factor when L doubles") {
    const auto m8 = build_halfbox_mesh(SectionShape::disc(1.0), 8.0, {0.25, 1.4});
    const auto m16 = build_halfbox_mesh(SectionShape::disc(1.0), 16.0, {0.25, 1.4});
    CHECK(m16.node_count() < 2 * m8.node_count());
}

TEST_CASE("volume locate round trip") {
    const auto m = build_halfbox_mesh(SectionShape::disc(1.0), 8.0, {0.3, 1.4});
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> d(0.05, 0.95);
    for (int k = 0; k < 30; ++k) {
        const Eigen::Vector3d p(8.0 * d(rng), 4.0 * (d(rng) - 0.5), 4.0 * (d(rng) - 0.5));
        const auto [elem, xi] = m.locate(p);
        Eigen::Matrix<double, 3, 8> P;
        for (int c = 0; c < 8; ++c) P.col(c) = m.nodes.col(m.hexes(c, elem));
        CHECK((P * hex_shape(xi) - p).norm() < 1e-10);
    }
    // element centroid maps to the reference origin
    Eigen::Matrix<double, 3, 8> P;
    for (int c = 0; c < 8; ++c) P.col(c) = m.nodes.col(m.hexes(c, 7));
    const Eigen::Vector3d centroid = P * hex_shape(Eigen::Vector3d::Zero());
    const auto [elem, xi] = m.locate(centroid);
    if (elem == 7) CHECK(xi.cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(m.locate({-1.0, 0.0, 0.0}), MeshError);
}

TEST_CASE("box mesh utility and dump format") {
    const auto m = build_box_mesh(1.0, 1.0, 1.0, 2, 2, 2);
    CHECK(m.elem_count() == 8);
    CHECK(m.volume() == doctest::Approx(1.0));
    std::ostringstream os;
    m.dump(os);
    std::string header;
    std::istringstream is(os.str());
    std::getline(is, header);
    CHECK(header == "patchbeam-mesh 1 27 8");
}

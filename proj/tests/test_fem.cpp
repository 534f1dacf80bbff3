#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "patchbeam/errors.hpp"
#include "patchbeam/fem.hpp"

using namespace patchbeam;

namespace {

DisplacementField nodal_field(const VolumeMesh& mesh,
                              const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& u) {
    DisplacementField U;
    U.values.resize(3 * mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) U.values.segment<3>(3 * i) = u(mesh.nodes.col(i));
    return U;
}

SparseSystem manual_system(const Eigen::MatrixXd& K, const Eigen::VectorXd& b) {
    SparseSystem sys;
    sys.n_dofs = static_cast<int>(K.rows());
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < K.rows(); ++i)
        for (int j = 0; j < K.cols(); ++j)
            if (K(i, j) != 0.0) trips.emplace_back(i, j, K(i, j));
    sys.K.resize(sys.n_dofs, sys.n_dofs);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    sys.b = b;
    return sys;
}

}  // namespace

TEST_CASE("single hex stiffness: symmetric with a 6-dimensional rigid kernel") {
    const auto mesh = build_box_mesh(1.0, 1.0, 1.0, 1, 1, 1);
    const auto sys = assemble_stiffness(mesh, MaterialField::identity_form(),
                                        MaterialFrame::Identity);
    const Eigen::MatrixXd K(sys.K);
    CHECK(K.rows() == 24);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    const double scale = es.eigenvalues().maxCoeff();
    int kernel = 0;
    for (int i = 0; i < 24; ++i)
        if (es.eigenvalues()[i] < 1e-12 * scale) ++kernel;
    CHECK(kernel == 6);
}

TEST_CASE("assembly is deterministic") {
    const auto mesh = build_box_mesh(1.0, 0.5, 0.5, 3, 2, 2);
    const auto mat = MaterialField::isotropic(1.0, 0.3);
    const auto s1 = assemble_stiffness(mesh, mat, MaterialFrame::Identity);
    const auto s2 = assemble_stiffness(mesh, mat, MaterialFrame::Identity);
    REQUIRE(s1.K.nonZeros() == s2.K.nonZeros());
    const Eigen::Map<const Eigen::VectorXd> v1(s1.K.valuePtr(), s1.K.nonZeros());
    const Eigen::Map<const Eigen::VectorXd> v2(s2.K.valuePtr(), s2.K.nonZeros());
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);  // bitwise identical
}

TEST_CASE("body load on one unit hex") {
    const auto mesh = build_box_mesh(1.0, 1.0, 1.0, 1, 1, 1);
    const auto f = assemble_body_load(
        mesh, [](const Eigen::Vector3d&) { return Eigen::Vector3d(1, 0, 0); }, 1.0,
        MaterialFrame::Identity);
    for (int i = 0; i < 8; ++i) {
        CHECK(f[3 * i + 0] == doctest::Approx(0.125).epsilon(1e-14));
        CHECK(f[3 * i + 1] == 0.0);
    }
    // zero load -> zero vector
    const auto z = assemble_body_load(
        mesh, [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); }, 1.0,
        MaterialFrame::Identity);
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);
    // transverse components scale with eps
    const auto f2 = assemble_body_load(
        mesh, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 1, 0); }, 0.1,
        MaterialFrame::Identity);
    const auto f2ref = assemble_body_load(
        mesh, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 1, 0); }, 1.0,
        MaterialFrame::Identity);
    CHECK((f2 - 0.1 * f2ref).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("prestrain load: Galerkin identity and force balance") {
    const auto mesh = build_box_mesh(1.0, 1.0, 1.0, 2, 2, 2);
    const auto mat = MaterialField::isotropic(1.0, 0.3);
    const auto sys = assemble_stiffness(mesh, mat, MaterialFrame::Identity);

    // h = A e(u*) for a nodal field u* reproduces K u* exactly (same rule).
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    DisplacementField ustar;
    ustar.values.resize(3 * mesh.node_count());
    for (int i = 0; i < ustar.values.size(); ++i) ustar.values[i] = d(rng);
    const VoigtMatrix C = mat.eval_tensor({0, 0, 0});
    const auto h = [&](const Eigen::Vector3d& x) {
        const auto [elem, xi] = mesh.locate(x);
        return tensor_apply(C, eval_strain(mesh, ustar, elem, xi));
    };
    const Eigen::VectorXd load = assemble_prestrain_load(mesh, h, MaterialFrame::Identity);
    const Eigen::VectorXd Ku = sys.K * ustar.values;
    CHECK((load - Ku).cwiseAbs().maxCoeff() < 1e-12 * Ku.cwiseAbs().maxCoeff());

    // h = 0 -> zero vector
    const auto z = assemble_prestrain_load(
        mesh, [](const Eigen::Vector3d&) { return Eigen::Matrix3d::Zero(); },
        MaterialFrame::Identity);
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);

    // constant h on a free element: nodal forces balance, opposite faces cancel
    const auto single = build_box_mesh(1.0, 1.0, 1.0, 1, 1, 1);
    Eigen::Matrix3d h0 = Eigen::Matrix3d::Zero();
    h0(0, 0) = 1.0;
    const Eigen::VectorXd fl = assemble_prestrain_load(
        single, [&](const Eigen::Vector3d&) { return h0; }, MaterialFrame::Identity);
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int i = 0; i < 8; ++i) sum += fl.segment<3>(3 * i);
    CHECK(sum.cwiseAbs().maxCoeff() < 1e-14);
    // nodes at x1=0 get -1/4 in component 1, nodes at x1=1 get +1/4
    for (int i = 0; i < single.node_count(); ++i) {
        const double expect = single.nodes(0, i) == 0.0 ? -0.25 : 0.25;
        CHECK(fl[3 * i] == doctest::Approx(expect).epsilon(1e-13));
    }

    // non-symmetric h is rejected
    Eigen::Matrix3d bad = Eigen::Matrix3d::Zero();
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(assemble_prestrain_load(
                        single, [&](const Eigen::Vector3d&) { return bad; },
                        MaterialFrame::Identity),
                    MaterialError);
}

TEST_CASE("impose_dirichlet and the reduced spectrum") {
    const auto mesh = build_box_mesh(1.0, 1.0, 1.0, 2, 1, 1);
    auto sys = assemble_stiffness(mesh, MaterialField::isotropic(1.0, 0.3),
                                  MaterialFrame::Identity);
    // clamp the x1 = 0 and x1 = 1 faces
    std::vector<int> set;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (mesh.nodes(0, i) == 0.0 || mesh.nodes(0, i) == 1.0) set.push_back(i);
    auto red = impose_dirichlet_zero(std::move(sys), set);
    const Eigen::MatrixXd Kr(red.K_red);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kr, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    // zero data means zero solution
    const auto U = solve_spd(red, 1e-12, 1000);
    CHECK(U.values.cwiseAbs().maxCoeff() == 0.0);

    // inhomogeneous values are met exactly
    auto sys2 = assemble_stiffness(mesh, MaterialField::isotropic(1.0, 0.3),
                                   MaterialFrame::Identity);
    auto red2 = impose_dirichlet(std::move(sys2), set, [&](int node) {
        return Eigen::Vector3d(0.01 * node, -0.02, 0.005);
    });
    const auto U2 = solve_spd(red2, 1e-12, 10000);
    for (int node : set) {
        CHECK(U2.values[3 * node + 0] == 0.01 * node);
        CHECK(U2.values[3 * node + 1] == -0.02);
        CHECK(U2.values[3 * node + 2] == 0.005);
    }

    // empty set is flagged
    auto sys3 = assemble_stiffness(mesh, MaterialField::isotropic(1.0, 0.3),
                                   MaterialFrame::Identity);
    CHECK_THROWS_AS(impose_dirichlet_zero(std::move(sys3), {}), SolveError);
}

TEST_CASE("solve_spd basics") {
    // 2x = 4 with one extra constrained dof
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2, 2);
    K(0, 0) = 2.0;
    K(1, 1) = 1.0;
    Eigen::VectorXd b(2);
    b << 4.0, 0.0;
    auto sys = impose_dirichlet_dofs(manual_system(K, b), {1}, Eigen::VectorXd::Zero(1));
    SolveStats stats;
    const auto U = solve_spd(sys, 1e-12, 100, &stats);
    CHECK(U.values[0] == doctest::Approx(2.0).epsilon(1e-12));

    // b = 0 -> x = 0 in zero iterations
    auto sys0 = impose_dirichlet_dofs(manual_system(K, Eigen::VectorXd::Zero(2)), {1},
                                      Eigen::VectorXd::Zero(1));
    SolveStats st0;
    const auto U0 = solve_spd(sys0, 1e-12, 100, &st0);
    CHECK(st0.iterations == 0);
    CHECK(U0.values.cwiseAbs().maxCoeff() == 0.0);

    // random SPD system against a dense factorization oracle
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const int n = 40;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = d(rng);
    const Eigen::MatrixXd A = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = d(rng);
    auto rsys = impose_dirichlet_dofs(manual_system(A, rhs), {0}, Eigen::VectorXd::Zero(1));
    const auto x = solve_spd(rsys, 1e-12, 10000);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd Ared = A.block(1, 1, n - 1, n - 1);
    expect.tail(n - 1) = Ared.ldlt().solve(rhs.tail(n - 1));
    CHECK((x.values - expect).norm() < 1e-9 * expect.norm());

    // non-convergence carries the residual
    auto tight = impose_dirichlet_dofs(manual_system(A, rhs), {0}, Eigen::VectorXd::Zero(1));
    CHECK_THROWS_AS(solve_spd(tight, 1e-14, 2), SolveError);
}

TEST_CASE("strains of interpolated fields") {
    const auto mesh = build_box_mesh(1.0, 1.0, 1.0, 2, 2, 2);

    // U = (x2, x1, 0): pure shear, e12 = 1
    auto U = nodal_field(mesh, [](const Eigen::Vector3d& x) {
        return Eigen::Vector3d(x[1], x[0], 0.0);
    });
    auto s = strain_at_quadrature(mesh, U);
    for (int k = 0; k < s.sample_count(); ++k) {
        CHECK(s.eng(5, k) == doctest::Approx(2.0).epsilon(1e-13));  // 2 e12
        CHECK(std::abs(s.eng(0, k)) < 1e-13);
    }

    // rigid rotation: zero strain, zero energy
    auto R = nodal_field(mesh, [](const Eigen::Vector3d& x) {
        return Eigen::Vector3d(-x[1], x[0], 0.0);
    });
    auto sr = strain_at_quadrature(mesh, R);
    CHECK(sr.eng.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(quadratic_energy(sr, MaterialField::identity_form(), MaterialFrame::Identity) <
          1e-25);

    // U = (x1, 0, 0): e11 = 1, identity-form energy = |box| = 1
    auto E = nodal_field(mesh, [](const Eigen::Vector3d& x) {
        return Eigen::Vector3d(x[0], 0.0, 0.0);
    });
    auto se = strain_at_quadrature(mesh, E);
    for (int k = 0; k < se.sample_count(); ++k)
        CHECK(se.eng(0, k) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(quadratic_energy(se, MaterialField::identity_form(), MaterialFrame::Identity) ==
          doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("energy and work identity on a solved system") {
    const auto mesh = build_box_mesh(1.0, 1.0, 1.0, 3, 3, 3);
    const auto mat = MaterialField::isotropic(1.0, 0.3);
    auto sys = assemble_stiffness(mesh, mat, MaterialFrame::Identity);
    const Eigen::VectorXd load = assemble_body_load(
        mesh, [](const Eigen::Vector3d& x) { return Eigen::Vector3d(x[1], 0.2, -x[0]); }, 1.0,
        MaterialFrame::Identity);
    sys.b = load;
    std::vector<int> set;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (mesh.nodes(0, i) == 0.0) set.push_back(i);
    auto red = impose_dirichlet_zero(std::move(sys), set);
    const auto U = solve_spd(red, 1e-12, 20000);

    const auto s = strain_at_quadrature(mesh, U);
    const double energy = quadratic_energy(s, mat, MaterialFrame::Identity);
    const double work = load.dot(U.values);
    CHECK(energy == doctest::Approx(work).epsilon(1e-9));

    // Galerkin orthogonality: residual vanishes on free dofs
    const Eigen::VectorXd res = red.reduced_rhs() - red.K_red * [&] {
        Eigen::VectorXd x(red.free_dofs.size());
        for (std::size_t k = 0; k < red.free_dofs.size(); ++k)
            x[k] = U.values[red.free_dofs[k]];
        return x;
    }();
    CHECK(res.norm() < 1e-10 * red.reduced_rhs().norm() * 10);
}

TEST_CASE("energy increases monotonically under nested refinement") {
    const auto mat = MaterialField::isotropic(1.0, 0.3);
    auto run = [&](int n) {
        const auto mesh = build_box_mesh(1.0, 1.0, 1.0, n, n, n);
        auto sys = assemble_stiffness(mesh, mat, MaterialFrame::Identity);
        sys.b = assemble_body_load(
            mesh, [](const Eigen::Vector3d& x) { return Eigen::Vector3d(0, x[0], 0); }, 1.0,
            MaterialFrame::Identity);
        std::vector<int> set;
        for (int i = 0; i < mesh.node_count(); ++i)
            if (mesh.nodes(0, i) == 0.0) set.push_back(i);
        const Eigen::VectorXd load = sys.b;
        auto red = impose_dirichlet_zero(std::move(sys), set);
        const auto U = solve_spd(red, 1e-12, 50000);
        return load.dot(U.values);
    };
    const double e1 = run(2), e2 = run(4), e4 = run(8);
    CHECK(e2 > e1);
    CHECK(e4 > e2);
    CHECK(e4 - e2 < e2 - e1);  // shrinking increments
}

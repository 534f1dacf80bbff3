#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "patchbeam/errors.hpp"
#include "patchbeam/material.hpp"

using namespace patchbeam;

namespace {

Eigen::Matrix3d random_symmetric(std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = d(rng);
    return 0.5 * (m + m.transpose());
}

}  // namespace

TEST_CASE("isotropic Voigt entries: E=1, nu=0.3") {
    // Lame conversion: lambda = E nu / ((1+nu)(1-2nu)), mu = E / (2(1+nu)).
    const auto mat = MaterialField::isotropic(1.0, 0.3);
    const VoigtMatrix V = mat.eval_tensor({0.3, 0.1, -0.2});
    CHECK(V(0, 0) == doctest::Approx(1.346154).epsilon(1e-6));
    CHECK(V(3, 3) == doctest::Approx(0.384615).epsilon(1e-6));
    CHECK(V(0, 1) == doctest::Approx(0.576923).epsilon(1e-6));
}

TEST_CASE("isotropic with nu=0 decouples") {
    const VoigtMatrix V = MaterialField::isotropic(1.0, 0.0).eval_tensor({0, 0, 0});
    Voigt6 expected;
    expected << 1, 1, 1, 0.5, 0.5, 0.5;
    CHECK((V - Eigen::MatrixXd(expected.asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("identity quadratic form") {
    const auto mat = MaterialField::identity_form();
    const VoigtMatrix V = mat.eval_tensor({0, 0, 0});
    std::mt19937 rng(7);
    for (int k = 0; k < 20; ++k) {
        const Eigen::Matrix3d e = random_symmetric(rng);
        const Voigt6 v = strain_to_voigt(e);
        CHECK(v.dot(V * v) == doctest::Approx(e.squaredNorm()).epsilon(1e-13));
        // sigma = e for the identity form
        CHECK((tensor_apply(V, e) - e).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("tensor_apply basics") {
    const VoigtMatrix I = MaterialField::identity_form().eval_tensor({0, 0, 0});
    Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
    e(0, 0) = 1.0;
    CHECK((tensor_apply(I, e) - e).cwiseAbs().maxCoeff() == 0.0);

    e.setZero();
    e(0, 1) = e(1, 0) = 1.0;
    const Eigen::Matrix3d s = tensor_apply(I, e);
    CHECK((s - e).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(strain_to_voigt(e).dot(I * strain_to_voigt(e)) == doctest::Approx(2.0));

    // isotropic with e = I: sigma = (3 lambda + 2 mu) I
    const double lambda = 0.576923076923077, mu = 0.384615384615385;
    const VoigtMatrix V = isotropic_voigt(lambda, mu);
    const Eigen::Matrix3d sI = tensor_apply(V, Eigen::Matrix3d::Identity());
    CHECK((sI - (3 * lambda + 2 * mu) * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coercivity estimates") {
    CHECK(MaterialField::identity_form().coercivity_estimate(3) == doctest::Approx(1.0));
    // isotropic eigenvalues on symmetric tensors are {3 lambda + 2 mu, 2 mu}
    CHECK(MaterialField::isotropic(1.0, 0.3).coercivity_estimate(3) ==
          doctest::Approx(0.769231).epsilon(1e-6));
    // nu -> 1/2: the shear eigenvalue stays 2 mu while the bulk one blows up
    const double m49 = MaterialField::isotropic(1.0, 0.49).coercivity_estimate(2);
    CHECK(m49 == doctest::Approx(2.0 * 1.0 / (2.0 * 1.49)).epsilon(1e-9));
}

TEST_CASE("modulated field samples the grid") {
    auto mat = MaterialField::isotropic(1.0, 0.3);
    mat.set_modulation(Expr::parse("1 + 0.5*sin(pi*y1)"));
    CHECK_FALSE(mat.axially_uniform());
    const double m = mat.coercivity_estimate(5);
    CHECK(m == doctest::Approx(0.769231).epsilon(1e-4));  // min at y1 = 0
    // evaluating a modulated field outside the axial domain is an error
    CHECK_THROWS_AS(mat.eval_tensor({2.0, 0, 0}), MaterialError);
}

TEST_CASE("inadmissible materials are rejected") {
    Eigen::Matrix<double, 21, 1> upper = Eigen::Matrix<double, 21, 1>::Zero();
    upper[0] = 1.0;  // c11 only: rank-1 quadratic form, not coercive
    CHECK_THROWS_AS(MaterialField::full_voigt(upper), MaterialError);
    CHECK_THROWS_AS(MaterialField::isotropic(-1.0, 0.3), MaterialError);
    CHECK_THROWS_AS(MaterialField::isotropic(1.0, 0.5), MaterialError);
}

TEST_CASE("full-Voigt identity round trip") {
    // The 21 upper coefficients of the identity form reproduce A xi:xi = |xi|^2.
    const VoigtMatrix I = MaterialField::identity_form().eval_tensor({0, 0, 0});
    Eigen::Matrix<double, 21, 1> upper;
    int k = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) upper[k++] = I(i, j);
    const auto mat = MaterialField::full_voigt(upper);
    CHECK((mat.eval_tensor({0.5, 0, 0}) - I).cwiseAbs().maxCoeff() == 0.0);
    CHECK(mat.coercivity_estimate(2) == doctest::Approx(1.0));
}

TEST_CASE("Voigt round trip and major symmetry") {
    std::mt19937 rng(11);
    for (int k = 0; k < 20; ++k) {
        const Eigen::Matrix3d e = random_symmetric(rng);
        CHECK((voigt_to_strain(strain_to_voigt(e)) - e).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((voigt_to_stress(stress_to_voigt(e)) - e).cwiseAbs().maxCoeff() < 1e-15);
    }
    const VoigtMatrix V = MaterialField::isotropic(2.0, 0.25).eval_tensor({0, 0, 0});
    for (int k = 0; k < 20; ++k) {
        const Eigen::Matrix3d e = random_symmetric(rng), f = random_symmetric(rng);
        const double ef = (tensor_apply(V, e).array() * f.array()).sum();
        const double fe = (tensor_apply(V, f).array() * e.array()).sum();
        CHECK(ef == doctest::Approx(fe).epsilon(1e-12));
    }
}

TEST_CASE("quadratic form dominated by coercivity estimate") {
    const auto mat = MaterialField::isotropic(1.0, 0.3);
    const double m_hat = mat.coercivity_estimate(3);
    const VoigtMatrix V = mat.eval_tensor({0.2, 0.3, -0.1});
    std::mt19937 rng(3);
    for (int k = 0; k < 50; ++k) {
        const Eigen::Matrix3d e = random_symmetric(rng);
        const Voigt6 v = strain_to_voigt(e);
        CHECK(v.dot(V * v) >= m_hat * e.squaredNorm() - 1e-12);
    }
}

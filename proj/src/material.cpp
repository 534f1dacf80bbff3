#include "patchbeam/material.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "patchbeam/errors.hpp"

namespace patchbeam {

Voigt6 strain_to_voigt(const Eigen::Matrix3d& e) {
    Voigt6 v;
    v << e(0, 0), e(1, 1), e(2, 2), 2.0 * e(1, 2), 2.0 * e(0, 2), 2.0 * e(0, 1);
    return v;
}

Eigen::Matrix3d voigt_to_stress(const Voigt6& s) {
    Eigen::Matrix3d m;
    m << s[0], s[5], s[4],
         s[5], s[1], s[3],
         s[4], s[3], s[2];
    return m;
}

Voigt6 stress_to_voigt(const Eigen::Matrix3d& s) {
    Voigt6 v;
    v << s(0, 0), s(1, 1), s(2, 2), s(1, 2), s(0, 2), s(0, 1);
    return v;
}

Eigen::Matrix3d voigt_to_strain(const Voigt6& v) {
    Eigen::Matrix3d e;
    e << v[0], 0.5 * v[5], 0.5 * v[4],
         0.5 * v[5], v[1], 0.5 * v[3],
         0.5 * v[4], 0.5 * v[3], v[2];
    return e;
}

Eigen::Matrix3d tensor_apply(const VoigtMatrix& V, const Eigen::Matrix3d& e) {
    return voigt_to_stress(V * strain_to_voigt(e));
}

VoigtMatrix isotropic_voigt(double lambda, double mu) {
    VoigtMatrix V = VoigtMatrix::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) V(i, j) = lambda;
        V(i, i) = lambda + 2.0 * mu;
        V(3 + i, 3 + i) = mu;
    }
    return V;
}

double voigt_min_eigenvalue(const VoigtMatrix& V) {
    // Mandel scaling D = diag(1,1,1,sqrt2,sqrt2,sqrt2): with v = D m the
    // engineering-quadratic form v^T V v becomes m^T (D V D) m, and |m| is
    // the Frobenius norm of the tensor.
    Voigt6 d;
    const double s = std::sqrt(2.0);
    d << 1, 1, 1, s, s, s;
    VoigtMatrix M = d.asDiagonal() * V * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<VoigtMatrix> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

MaterialField MaterialField::isotropic(double young, double poisson) {
    if (young <= 0.0 || poisson <= -1.0 || poisson >= 0.5)
        throw MaterialError("isotropic material requires E > 0 and -1 < nu < 1/2");
    const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    const double mu = young / (2.0 * (1.0 + poisson));
    MaterialField f;
    f.base_ = isotropic_voigt(lambda, mu);
    return f;
}

MaterialField MaterialField::full_voigt(const Eigen::Matrix<double, 21, 1>& upper) {
    MaterialField f;
    int k = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
            f.base_(i, j) = upper[k];
            f.base_(j, i) = upper[k];
            ++k;
        }
    if (voigt_min_eigenvalue(f.base_) <= 0.0)
        throw MaterialError("full-Voigt material is not coercive");
    return f;
}

MaterialField MaterialField::identity_form() {
    // A xi : xi = |xi|^2 is the isotropic tensor with lambda = 0, mu = 1/2.
    MaterialField f;
    f.base_ = isotropic_voigt(0.0, 0.5);
    return f;
}

MaterialField& MaterialField::set_modulation(Expr modulation) {
    modulation_ = std::move(modulation);
    modulated_ = true;
    return *this;
}

VoigtMatrix MaterialField::eval_tensor(const Eigen::Vector3d& y) const {
    if (!modulated_) return base_;
    // The modulation expression is defined on the closed cylinder only.
    constexpr double tol = 1e-9;
    if (y[0] < -tol || y[0] > 1.0 + tol)
        throw MaterialError("material evaluated outside the axial range [0,1]");
    const double s = modulation_(y);
    if (!(s > 0.0))
        throw MaterialError("material modulation must stay positive");
    return s * base_;
}

double MaterialField::coercivity_estimate(int n_samples) const {
    if (n_samples < 1)
        throw MaterialError("coercivity estimate needs a nonempty sample grid");
    double m_hat = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples && m_hat > 0.0; ++i) {
        const double y1 = n_samples == 1 ? 0.0 : double(i) / (n_samples - 1);
        for (int j = 0; j < n_samples; ++j) {
            const double y2 = n_samples == 1 ? 0.0 : -1.0 + 2.0 * j / (n_samples - 1);
            for (int k = 0; k < n_samples; ++k) {
                const double y3 = n_samples == 1 ? 0.0 : -1.0 + 2.0 * k / (n_samples - 1);
                m_hat = std::min(m_hat, voigt_min_eigenvalue(eval_tensor({y1, y2, y3})));
            }
        }
        if (!modulated_) break;  // constant field, one sample suffices
    }
    if (!(m_hat > 0.0))
        throw MaterialError("material is not admissible: coercivity estimate <= 0");
    return m_hat;
}

bool MaterialField::axially_uniform() const {
    return !modulated_ || modulation_.independent_of(0);
}

bool MaterialField::spatially_uniform() const {
    return !modulated_ || (modulation_.independent_of(0) && modulation_.independent_of(1) &&
                           modulation_.independent_of(2));
}

}  // namespace patchbeam

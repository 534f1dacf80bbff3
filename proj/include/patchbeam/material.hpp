#ifndef PATCHBEAM_MATERIAL_HPP
#define PATCHBEAM_MATERIAL_HPP

#include <Eigen/Core>

#include "patchbeam/expr.hpp"

namespace patchbeam {

// 6x6 matrix of the elasticity tensor in Voigt form.
//
// Ordering (11, 22, 33, 23, 13, 12).  Strain 6-vectors carry engineering
// shears (doubled off-diagonal entries), stress 6-vectors are unscaled, so
// for any symmetric e:  A e : e  =  strain_voigt(e) . (V * strain_voigt(e)).
// This convention is fixed project-wide; Gram matrices and penalty blocks
// depend on it bit for bit.
using VoigtMatrix = Eigen::Matrix<double, 6, 6>;
using Voigt6 = Eigen::Matrix<double, 6, 1>;

// e (symmetric) -> engineering strain 6-vector.
Voigt6 strain_to_voigt(const Eigen::Matrix3d& e);

// stress 6-vector -> symmetric tensor.
Eigen::Matrix3d voigt_to_stress(const Voigt6& s);

// symmetric tensor -> stress-type 6-vector (no doubling).
Voigt6 stress_to_voigt(const Eigen::Matrix3d& s);

// engineering strain 6-vector -> symmetric tensor.
Eigen::Matrix3d voigt_to_strain(const Voigt6& v);

// sigma = V : e under the convention above.
Eigen::Matrix3d tensor_apply(const VoigtMatrix& V, const Eigen::Matrix3d& e);

// Isotropic Voigt matrix from Lame parameters.
VoigtMatrix isotropic_voigt(double lambda, double mu);

// Smallest eigenvalue of the quadratic form xi -> V xi : xi over symmetric
// tensors with the Frobenius norm (computed via the normalized Mandel
// representation, where the form becomes an ordinary symmetric eigenproblem).
double voigt_min_eigenvalue(const VoigtMatrix& V);

// The anisotropic heterogeneous elasticity tensor A(y) on the unit-section
// cylinder closure, plus its coercivity constant m.  Heterogeneity is
// restricted to a smooth positive scalar modulation of a constant base
// matrix, supplied as a closed-form expression in y.
class MaterialField {
  public:
    // Isotropic base from Young's modulus and Poisson ratio.
    static MaterialField isotropic(double young, double poisson);

    // Fully anisotropic base from the 21 upper-triangle Voigt coefficients,
    // row-major: c11 c12 ... c16 c22 ... c66.
    static MaterialField full_voigt(const Eigen::Matrix<double, 21, 1>& upper);

    // Identity quadratic form A xi : xi = |xi|^2.
    static MaterialField identity_form();

    // Multiplies the whole matrix by the (positive) expression value.
    MaterialField& set_modulation(Expr modulation);

    // A(y) as a Voigt matrix.  y must lie in the closed unit-section cylinder
    // [0,1] x R^2 (the transverse extent is the caller's business); y1 outside
    // [0,1] beyond a small tolerance is a domain error.
    VoigtMatrix eval_tensor(const Eigen::Vector3d& y) const;

    // A(0), the frozen tensor used by every half-space problem.
    VoigtMatrix at_origin() const { return eval_tensor(Eigen::Vector3d::Zero()); }

    // min over an n x n x n sample grid of [0,1] x [-1,1]^2 of the smallest
    // quadratic-form eigenvalue.  Throws MaterialError if the estimate is
    // not positive.
    double coercivity_estimate(int n_samples) const;

    bool axially_uniform() const;  // A independent of y1
    bool spatially_uniform() const;

  private:
    VoigtMatrix base_ = VoigtMatrix::Zero();
    bool modulated_ = false;
    Expr modulation_;
};

}  // namespace patchbeam

#endif

#ifndef PATCHBEAM_ELEMENTS_HPP
#define PATCHBEAM_ELEMENTS_HPP

#include <Eigen/Core>
#include <array>

namespace patchbeam {

// Reference-element kit for bilinear quads and trilinear hexes.
//
// Quad corners, counterclockwise:  (-1,-1) (1,-1) (1,1) (-1,1).
// Hex corners: the quad corners at xi3 = -1 (indices 0..3) then at
// xi3 = +1 (indices 4..7).  Meshes store quads counterclockwise in the
// transverse plane and hexes with the axial coordinate increasing from the
// bottom face, which keeps every Jacobian determinant positive.

inline constexpr double kGauss1 = 0.57735026918962576451;  // 1/sqrt(3)

inline const std::array<double, 2>& gauss2() {
    static const std::array<double, 2> pts = {-kGauss1, kGauss1};
    return pts;
}

inline Eigen::Vector4d quad_shape(double xi, double eta) {
    return 0.25 * Eigen::Vector4d((1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                                  (1 + xi) * (1 + eta), (1 - xi) * (1 + eta));
}

inline Eigen::Matrix<double, 4, 2> quad_shape_grad(double xi, double eta) {
    Eigen::Matrix<double, 4, 2> g;
    g << -(1 - eta), -(1 - xi),
          (1 - eta), -(1 + xi),
          (1 + eta),  (1 + xi),
         -(1 + eta),  (1 - xi);
    return 0.25 * g;
}

inline constexpr int kHexSign[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                       {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

inline Eigen::Matrix<double, 8, 1> hex_shape(const Eigen::Vector3d& xi) {
    Eigen::Matrix<double, 8, 1> n;
    for (int c = 0; c < 8; ++c)
        n[c] = 0.125 * (1 + kHexSign[c][0] * xi[0]) * (1 + kHexSign[c][1] * xi[1]) *
               (1 + kHexSign[c][2] * xi[2]);
    return n;
}

inline Eigen::Matrix<double, 8, 3> hex_shape_grad(const Eigen::Vector3d& xi) {
    Eigen::Matrix<double, 8, 3> g;
    for (int c = 0; c < 8; ++c) {
        const double s0 = kHexSign[c][0], s1 = kHexSign[c][1], s2 = kHexSign[c][2];
        g(c, 0) = 0.125 * s0 * (1 + s1 * xi[1]) * (1 + s2 * xi[2]);
        g(c, 1) = 0.125 * (1 + s0 * xi[0]) * s1 * (1 + s2 * xi[2]);
        g(c, 2) = 0.125 * (1 + s0 * xi[0]) * (1 + s1 * xi[1]) * s2;
    }
    return g;
}

}  // namespace patchbeam

#endif

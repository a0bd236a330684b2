#pragma once

#include "medsplat/common.hpp"

namespace medsplat {

// Degree-3 real spherical harmonics, 16 coefficients per channel, in the
// sign/order convention of the splatting codebases (band 1 ordered -y, z, -x).
inline constexpr int kShCoeffCount = 16;
inline constexpr double kShC0 = 0.28209479177387814;  // 1 / (2 sqrt(pi))
inline constexpr double kShC1 = 0.4886025119029199;   // sqrt(3 / (4 pi))

using ShVec = Eigen::Matrix<double, kShCoeffCount, 1>;
using ShMatrix = Eigen::Matrix<double, kShCoeffCount, 3>;  // one column per channel

// Basis values at a unit direction. Throws NonUnitDirection if |dir| is off by
// more than 1e-6.
ShVec sh_basis(const Vec3& dir);

// d(basis)/d(direction components), treating the components as free coordinates.
// The caller owns the normalization projection when the direction is derived
// from an unnormalized vector.
Eigen::Matrix<double, kShCoeffCount, 3> sh_basis_jacobian(const Vec3& dir);

inline double sh_eval(const ShVec& coeffs, const ShVec& basis) { return coeffs.dot(basis); }

inline Vec3 sh_eval(const ShMatrix& coeffs, const ShVec& basis) {
    return coeffs.transpose() * basis;
}

inline Vec3 sh_eval(const ShMatrix& coeffs, const Vec3& dir) {
    return sh_eval(coeffs, sh_basis(dir));
}

// Gaussian color readout: clamp(sh + 0.5, >= 0), so a zero DC renders mid-gray.
inline Vec3 sh_color_readout(const ShMatrix& coeffs, const ShVec& basis) {
    return (sh_eval(coeffs, basis).array() + 0.5).cwiseMax(0.0);
}

// Inverse of the readout for a color inside the clamp's linear region: the DC
// coefficient that reproduces `color` with all higher bands zero.
inline Vec3 sh_dc_from_color(const Vec3& color) { return (color.array() - 0.5) / kShC0; }

inline Vec3 sh_color_from_dc(const Vec3& dc) {
    return (dc.array() * kShC0 + 0.5).cwiseMax(0.0);
}

}  // namespace medsplat

#pragma once

#include "medsplat/common.hpp"

namespace medsplat::detail {

// Separable 11x11 Gaussian-window SSIM with border renormalization, so any
// image size works; interiors match the classic valid-window formulation.
// MS-SSIM follows the standard 5-scale construction with 2x average-pool
// downsampling and luminance applied at the coarsest scale only.

inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
inline constexpr double kSsimC1 = kSsimK1 * kSsimK1;  // dynamic range 1.0
inline constexpr double kSsimC2 = kSsimK2 * kSsimK2;
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kMsWeights5[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

// Number of scales usable for this image: each scale needs the window to fit,
// capped at 5. Always at least one (borders renormalize).
int ms_ssim_scales(int width, int height);

// Mean MS-SSIM over pixels and channels of `x` vs `y`, using `scales` levels.
// When dx is non-null it receives dValue/dx (same shape as x); y is treated as
// constant.
double ms_ssim_value(const Image& x, const Image& y, int scales, Image* dx);

}  // namespace medsplat::detail

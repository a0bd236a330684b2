#pragma once

#include "medsplat/common.hpp"

namespace medsplat {

// 10 log10(1 / MSE) over inputs clamped to [0,1]; +infinity for identical images.
double psnr(const Image& a, const Image& b);

// Single-scale SSIM mean (11x11 Gaussian window, border-renormalized).
double ssim(const Image& a, const Image& b);

// Multi-scale SSIM mean with the scale count adapted to the image size.
double ms_ssim(const Image& a, const Image& b);

// Scale `restored` so its mean matches gt's mean, clamp to [0,1].
// Throws ZeroMeanRestored.
Image exposure_align(const Image& restored, const Image& gt);

}  // namespace medsplat

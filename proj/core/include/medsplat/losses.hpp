#pragma once

#include "medsplat/render.hpp"

#include <string>

namespace medsplat {

// The printed ranking formula rewards concordance with unbounded negative
// values; hinge penalizes violations instead and is the optimization default.
// Both stay selectable.
enum class DepthRankMode { hinge, literal };

DepthRankMode depth_rank_mode_from_string(const std::string& s);
std::string to_string(DepthRankMode mode);

struct LossWeights {
    double lambda_l1 = 0.8;
    double lambda_ssim = 0.2;
    double lambda_depth = 5.0;
    double epsilon = 1e-6;
    int patch_n = 16;
    bool single_scale_ssim = false;
    DepthRankMode rank_mode = DepthRankMode::hinge;
};

// W = 1 / (rendered + epsilon). Treated as a constant (stop gradient) by every
// loss below; callers that recompute gradients numerically must freeze it.
Image weight_matrix(const Image& rendered, double epsilon);

// mean |W (rendered - target)|
double loss_reg_l1(const Image& rendered, const Image& target, const Image& W,
                   Image* d_rendered = nullptr);

// 1 - MS-SSIM(clamp(W*rendered, 0, 10), clamp(W*target, 0, 10))
double loss_reg_ms_ssim(const Image& rendered, const Image& target, const Image& W,
                        bool single_scale = false, Image* d_rendered = nullptr);

// Area-average pooling onto an n x n grid; cells partition the image.
Image downsample_area(const Image& map, int n);

// Pairwise ordinal consistency over the downsampled maps. Gradient is with
// respect to the full-resolution rendered depth.
double loss_depth_rank(const Image& rendered_depth, const Image& pseudo_depth, int n,
                       DepthRankMode mode, Image* d_rendered_depth = nullptr);

struct LossResult {
    double total = 0.0;
    double l1 = 0.0;
    double ms_ssim = 0.0;
    double depth = 0.0;
    Image d_color;  // dTotal/d rendered color
    Image d_depth;  // dTotal/d rendered depth (empty without pseudo-depth)
};

// Weighted sum of the three terms with gradients ready for render_backward.
// The weighting matrix is computed from rendered.color internally.
LossResult total_loss(const RenderOutput& rendered, const Image& target,
                      const Image* pseudo_depth, const LossWeights& weights);

// Same, but with an externally supplied (frozen) weighting matrix. This is the
// stop-gradient-faithful entry point for finite-difference checks.
LossResult total_loss_with_weight(const Image& rendered_color, const Image& rendered_depth,
                                  const Image& target, const Image* pseudo_depth, const Image& W,
                                  const LossWeights& weights);

}  // namespace medsplat

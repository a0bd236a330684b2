#pragma once

#include "medsplat/render.hpp"

#include <vector>

namespace medsplat::detail {

// Per-view projection cache, sorted front to back by (depth, original index).
struct SplatView {
    int index = 0;  // into scene.gaussians
    Vec2 mean2d = Vec2::Zero();
    Mat2 cov2d = Mat2::Zero();
    Mat2 cov2d_inv = Mat2::Zero();
    double depth = 0.0;
    double opacity = 0.0;  // sigmoid(logit)
    Vec3 color = Vec3::Zero();
    // pixel-index bbox, inclusive; empty when x1 < x0
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
    // cached for backward
    Vec3 cam_pos = Vec3::Zero();
    Vec3 view_dir = Vec3::Zero();   // unit, camera center -> mean
    double view_dist = 0.0;
    ShVec basis = ShVec::Zero();
    Vec3 color_pre_clamp = Vec3::Zero();
};

std::vector<SplatView> project_scene(const Scene& scene, const Camera& camera,
                                     const RenderOptions& opts);

// Unclamped Gaussian weight at a pixel center; also reports the Mahalanobis
// distance via q_out when non-null.
inline double splat_alpha(const SplatView& s, double px, double py, double* q_out = nullptr) {
    const Vec2 d(px - s.mean2d.x(), py - s.mean2d.y());
    const double q = d.dot(s.cov2d_inv * d);
    if (q_out) *q_out = q;
    return s.opacity * std::exp(-0.5 * q);
}

inline int row_blocks(int height) { return (height + 3) / 4; }
inline void block_rows(int block, int height, int* r0, int* r1) {
    *r0 = block * 4;
    *r1 = std::min(height, *r0 + 4);
}

}  // namespace medsplat::detail

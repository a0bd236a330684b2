#pragma once

#include "medsplat/render.hpp"

#include <optional>

namespace medsplat {

struct PointRecord {
    Vec3 position = Vec3::Zero();
    Vec3 color = Vec3::Zero();  // [0,1]
};

// One primitive per point: scale from the mean distance to the 3 nearest
// neighbors, opacity logit(0.1), DC color from the point color, identity
// rotation. Bounds come from the points inflated by 10% unless supplied.
Scene init_from_points(const std::vector<PointRecord>& points,
                       const std::optional<Bounds>& bounds = std::nullopt);

struct AffineFit {
    double k = 1.0;
    double b = 0.0;
    long sample_count = 0;
    double residual_rms = 0.0;
};

// Least squares of rendered depth on pseudo-depth over the well-initialized
// region {transmittance < tau_w}. Throws DegenerateFit when fewer than two
// pixels qualify or the pseudo-depth is constant there.
AffineFit affine_fit(const Image& rendered_depth, const Image& pseudo_depth,
                     const Image& transmittance, double tau_w = 0.99);

struct RegionMasks {
    int width = 0, height = 0;
    std::vector<uint8_t> omega_w;  // well-initialized: T < tau_w
    std::vector<uint8_t> omega_p;  // poorly covered:   T >= tau_w
    std::vector<uint8_t> omega_n;  // near field: pseudo < tau_near * max(pseudo)
};

RegionMasks region_masks(const Image& pseudo_depth, const Image& transmittance,
                         double tau_w = 0.99, double tau_near = 0.5);

struct PdgcConfig {
    double tau_w = 0.99;
    double tau_near = 0.5;
    int stride = 4;
    int max_insertions = 5000;
    double near_clip = kNearClip;
    double insert_opacity = 0.1;
};

// New primitives for pixels in omega_n AND omega_p, unprojected at the
// affine-corrected pseudo-depth, colored from the observed target pixel.
// Requires a successful affine fit for this view.
std::vector<GaussianPrimitive> complement(const Camera& camera, const Image& pseudo_depth,
                                          const RenderOutput& rendered, const Image& target,
                                          const AffineFit& fit, const PdgcConfig& config = {});

}  // namespace medsplat

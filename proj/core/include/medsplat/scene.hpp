#pragma once

#include "medsplat/common.hpp"
#include "medsplat/sh.hpp"

#include <optional>
#include <vector>

namespace medsplat {

// Primitives behind this camera-space depth are culled per view.
inline constexpr double kNearClip = 0.01;
// Low-pass floor added to the projected covariance diagonal (px^2) before inversion.
inline constexpr double kCov2dDilation = 0.3;

// One anisotropic splat. Scales live in log space and opacity as a logit so the
// optimizer works on unconstrained reals.
struct GaussianPrimitive {
    Vec3 position = Vec3::Zero();
    Quat rotation = Quat::Identity();   // kept unit-norm after every optimizer step
    Vec3 log_scale = Vec3::Zero();
    double opacity_logit = 0.0;
    ShMatrix color_sh = ShMatrix::Zero();

    double opacity() const { return sigmoid(opacity_logit); }
    Vec3 scale() const { return log_scale.array().exp(); }
};

// Pinhole camera with a world-to-camera rigid transform. Pixel (ix, iy) is
// sampled at continuous coordinate (ix + 0.5, iy + 0.5).
struct Camera {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 1, height = 1;
    Mat3 rotation = Mat3::Identity();  // world -> camera
    Vec3 translation = Vec3::Zero();

    Vec3 cam_from_world(const Vec3& p) const { return rotation * p + translation; }
    Vec3 world_from_cam(const Vec3& p) const { return rotation.transpose() * (p - translation); }
    Vec3 center() const { return -(rotation.transpose() * translation); }

    // Unit world-space direction through a continuous pixel coordinate.
    Vec3 pixel_ray(double px, double py) const {
        const Vec3 d_cam((px - cx) / fx, (py - cy) / fy, 1.0);
        return (rotation.transpose() * d_cam).normalized();
    }
};

struct Scene {
    std::vector<GaussianPrimitive> gaussians;
    Bounds bounds;
};

// Sigma = R diag(exp(2 log_scale)) R^T; symmetric positive definite for any input.
Mat3 covariance_from_params(const Quat& rotation, const Vec3& log_scale);

struct Projected {
    Vec2 mean2d = Vec2::Zero();
    Mat2 cov2d = Mat2::Zero();  // includes the low-pass dilation
    double depth = 0.0;         // camera-space z of the mean
};

// EWA first-order projection. Empty when the mean is behind the near clip
// (the primitive is skipped for this view).
std::optional<Projected> project_gaussian(const Camera& camera, const GaussianPrimitive& g,
                                          double near_clip = kNearClip);

// Inverse pinhole at a continuous pixel coordinate. Throws NonPositiveDepth.
Vec3 unproject_pixel(const Camera& camera, const Vec2& pixel, double depth);

}  // namespace medsplat

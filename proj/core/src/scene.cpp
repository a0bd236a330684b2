#include "medsplat/scene.hpp"

namespace medsplat {

Mat3 covariance_from_params(const Quat& rotation, const Vec3& log_scale) {
    const Mat3 R = rotation.normalized().toRotationMatrix();
    const Vec3 d = (2.0 * log_scale).array().exp();
    return R * d.asDiagonal() * R.transpose();
}

std::optional<Projected> project_gaussian(const Camera& camera, const GaussianPrimitive& g,
                                          double near_clip) {
    const Vec3 pc = camera.cam_from_world(g.position);
    if (pc.z() <= near_clip) return std::nullopt;

    const double x = pc.x(), y = pc.y(), z = pc.z();
    Projected out;
    out.depth = z;
    out.mean2d = Vec2(camera.cx + camera.fx * x / z, camera.cy + camera.fy * y / z);

    Eigen::Matrix<double, 2, 3> J;
    J << camera.fx / z, 0.0, -camera.fx * x / (z * z),
         0.0, camera.fy / z, -camera.fy * y / (z * z);

    const Mat3 sigma_cam =
        camera.rotation * covariance_from_params(g.rotation, g.log_scale) *
        camera.rotation.transpose();
    out.cov2d = J * sigma_cam * J.transpose();
    out.cov2d(0, 0) += kCov2dDilation;
    out.cov2d(1, 1) += kCov2dDilation;
    return out;
}

Vec3 unproject_pixel(const Camera& camera, const Vec2& pixel, double depth) {
    if (!(depth > 0.0))
        raise("NonPositiveDepth", "depth = " + std::to_string(depth));
    const Vec3 pc((pixel.x() - camera.cx) / camera.fx * depth,
                  (pixel.y() - camera.cy) / camera.fy * depth, depth);
    return camera.world_from_cam(pc);
}

}  // namespace medsplat

#include "medsplat/parallel.hpp"
#include "render_internal.hpp"

#include <algorithm>

namespace medsplat {

namespace detail {

std::vector<SplatView> project_scene(const Scene& scene, const Camera& camera,
                                     const RenderOptions& opts) {
    std::vector<SplatView> views;
    views.reserve(scene.gaussians.size());
    const Vec3 cam_center = camera.center();

    for (int i = 0; i < static_cast<int>(scene.gaussians.size()); ++i) {
        const auto& g = scene.gaussians[i];
        const auto proj = project_gaussian(camera, g, opts.near_clip);
        if (!proj) continue;

        SplatView s;
        s.index = i;
        s.mean2d = proj->mean2d;
        s.cov2d = proj->cov2d;
        const double det = s.cov2d.determinant();
        if (!(det > 0.0)) continue;
        s.cov2d_inv = s.cov2d.inverse();
        s.depth = proj->depth;
        s.opacity = g.opacity();
        s.cam_pos = camera.cam_from_world(g.position);

        const Vec3 to_mean = g.position - cam_center;
        s.view_dist = to_mean.norm();
        s.view_dir = s.view_dist > 1e-12 ? Vec3(to_mean / s.view_dist) : Vec3(0, 0, 1);
        s.basis = sh_basis(s.view_dir);
        s.color_pre_clamp = (g.color_sh.transpose() * s.basis).array() + 0.5;
        s.color = s.color_pre_clamp.cwiseMax(0.0);

        if (opts.alpha_min > 0.0) {
            if (s.opacity <= opts.alpha_min) continue;  // can never pass the cut
            // Outside q = 2 ln(opacity / alpha_min) the fragment is below the
            // cut, so the bbox skip is exact.
            const double q_max = 2.0 * std::log(s.opacity / opts.alpha_min);
            const double rx = std::sqrt(q_max * s.cov2d(0, 0)) + 1e-9;
            const double ry = std::sqrt(q_max * s.cov2d(1, 1)) + 1e-9;
            // pixel centers at ix + 0.5
            s.x0 = std::max(0, static_cast<int>(std::ceil(s.mean2d.x() - rx - 0.5)));
            s.x1 = std::min(camera.width - 1, static_cast<int>(std::floor(s.mean2d.x() + rx - 0.5)));
            s.y0 = std::max(0, static_cast<int>(std::ceil(s.mean2d.y() - ry - 0.5)));
            s.y1 = std::min(camera.height - 1, static_cast<int>(std::floor(s.mean2d.y() + ry - 0.5)));
            if (s.x1 < s.x0 || s.y1 < s.y0) continue;
        } else {
            s.x0 = 0;
            s.x1 = camera.width - 1;
            s.y0 = 0;
            s.y1 = camera.height - 1;
        }
        views.push_back(s);
    }

    std::stable_sort(views.begin(), views.end(), [](const SplatView& a, const SplatView& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.index < b.index;
    });
    return views;
}

}  // namespace detail

using detail::SplatView;

namespace {

void composite_pixel(const std::vector<SplatView>& splats, int px, int py,
                     const MediumSample& med, const RenderOptions& opts, Vec3* color,
                     double* depth, double* transmittance, Vec3* restored) {
    const double cx = px + 0.5, cy = py + 0.5;

    Vec3 c_obj = Vec3::Zero();
    Vec3 c_rest = Vec3::Zero();
    Vec3 c_med_acc = Vec3::Zero();
    double sum_zat = 0.0;   // sum z_i alpha_i T_i
    double sum_at = 0.0;    // sum alpha_i T_i
    double T = 1.0;
    Vec3 B_prev = Vec3::Ones();  // exp(-sigma_bs * z_{i-1}), z_0 = 0
    double z_last = 0.0;

    for (const auto& s : splats) {
        if (px < s.x0 || px > s.x1 || py < s.y0 || py > s.y1) continue;
        double alpha = detail::splat_alpha(s, cx, cy);
        if (alpha < opts.alpha_min) continue;
        alpha = std::min(alpha, opts.alpha_max);

        const Vec3 B_i = (-s.depth * med.sigma_bs.array()).exp();
        const Vec3 A_i = (-s.depth * med.sigma_att.array()).exp();
        const double w = alpha * T;
        c_obj += w * s.color.cwiseProduct(A_i);
        c_rest += w * s.color;
        c_med_acc += T * med.c_med.cwiseProduct(B_prev - B_i);
        sum_zat += s.depth * w;
        sum_at += w;
        B_prev = B_i;
        z_last = s.depth;
        T *= (1.0 - alpha);
        if (opts.early_stop && T < opts.early_stop_T) break;
    }

    c_med_acc += T * med.c_med.cwiseProduct(B_prev);  // tail to infinity
    *color = c_obj + c_med_acc;
    *transmittance = T;
    *depth = (1.0 - T) >= kDepthGuard ? sum_zat / (1.0 - T) : 0.0;
    if (restored) *restored = c_rest;
    (void)sum_at;
    (void)z_last;
}

}  // namespace

RenderOutput render(const Scene& scene, const MediumGrid& medium, const Camera& camera,
                    const RenderOptions& opts) {
    const auto splats = detail::project_scene(scene, camera, opts);
    const int W = camera.width, H = camera.height;

    RenderOutput out;
    out.color = Image(W, H, 3);
    out.depth = Image(W, H, 1);
    out.transmittance = Image(W, H, 1);
    if (opts.restored) out.restored = Image(W, H, 3);

    const Vec3 cam_center = camera.center();
    parallel_blocks(detail::row_blocks(H), opts.threads, [&](int block) {
        int r0, r1;
        detail::block_rows(block, H, &r0, &r1);
        for (int py = r0; py < r1; ++py) {
            for (int px = 0; px < W; ++px) {
                const Vec3 ray = camera.pixel_ray(px + 0.5, py + 0.5);
                const MediumSample med = medium_eval(medium, cam_center, ray);
                Vec3 color, restored;
                double depth, transmittance;
                composite_pixel(splats, px, py, med, opts, &color, &depth, &transmittance,
                                opts.restored ? &restored : nullptr);
                out.color.set_rgb(px, py, color);
                out.depth.at(px, py) = depth;
                out.transmittance.at(px, py) = transmittance;
                if (opts.restored) out.restored.set_rgb(px, py, restored);
            }
        }
    });
    return out;
}

RenderOutput render_vanilla(const Scene& scene, const Camera& camera, const Vec3& background,
                            const RenderOptions& opts) {
    const auto splats = detail::project_scene(scene, camera, opts);
    const int W = camera.width, H = camera.height;

    RenderOutput out;
    out.color = Image(W, H, 3);
    out.depth = Image(W, H, 1);
    out.transmittance = Image(W, H, 1);

    parallel_blocks(detail::row_blocks(H), opts.threads, [&](int block) {
        int r0, r1;
        detail::block_rows(block, H, &r0, &r1);
        for (int py = r0; py < r1; ++py) {
            for (int px = 0; px < W; ++px) {
                const double cx = px + 0.5, cy = py + 0.5;
                Vec3 c = Vec3::Zero();
                double sum_zat = 0.0;
                double T = 1.0;
                for (const auto& s : splats) {
                    if (px < s.x0 || px > s.x1 || py < s.y0 || py > s.y1) continue;
                    double alpha = detail::splat_alpha(s, cx, cy);
                    if (alpha < opts.alpha_min) continue;
                    alpha = std::min(alpha, opts.alpha_max);
                    const double w = alpha * T;
                    c += w * s.color;
                    sum_zat += s.depth * w;
                    T *= (1.0 - alpha);
                    if (opts.early_stop && T < opts.early_stop_T) break;
                }
                out.color.set_rgb(px, py, c + T * background);
                out.depth.at(px, py) = (1.0 - T) >= kDepthGuard ? sum_zat / (1.0 - T) : 0.0;
                out.transmittance.at(px, py) = T;
            }
        }
    });
    return out;
}

}  // namespace medsplat

#include "medsplat/pdgc.hpp"

#include <algorithm>

namespace medsplat {

Scene init_from_points(const std::vector<PointRecord>& points,
                       const std::optional<Bounds>& bounds) {
    if (points.empty()) raise("EmptyPointCloud", "no points to initialize from");

    Scene scene;
    if (bounds) {
        scene.bounds = *bounds;
    } else {
        Vec3 lo = points[0].position, hi = points[0].position;
        for (const auto& p : points) {
            lo = lo.cwiseMin(p.position);
            hi = hi.cwiseMax(p.position);
        }
        scene.bounds = Bounds{lo, hi}.inflated(1.1);
        // degenerate axes still need a usable box
        for (int a = 0; a < 3; ++a)
            if (scene.bounds.max[a] - scene.bounds.min[a] < 1e-6) {
                scene.bounds.min[a] -= 0.5;
                scene.bounds.max[a] += 0.5;
            }
    }

    const size_t n = points.size();
    scene.gaussians.reserve(n);
    const double fallback_scale = 0.1 * scene.bounds.max_extent();

    for (size_t i = 0; i < n; ++i) {
        double scale = fallback_scale;
        if (n >= 4) {
            // mean distance to the 3 nearest neighbors
            double best[3] = {1e300, 1e300, 1e300};
            for (size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d = (points[j].position - points[i].position).norm();
                if (d < best[2]) {
                    best[2] = d;
                    if (best[2] < best[1]) std::swap(best[1], best[2]);
                    if (best[1] < best[0]) std::swap(best[0], best[1]);
                }
            }
            scale = std::max((best[0] + best[1] + best[2]) / 3.0, 1e-6);
        }

        GaussianPrimitive g;
        g.position = points[i].position;
        g.log_scale = Vec3::Constant(std::log(scale));
        g.opacity_logit = logit(0.1);
        const Vec3 dc = sh_dc_from_color(points[i].color);
        for (int ch = 0; ch < 3; ++ch) g.color_sh(0, ch) = dc[ch];
        scene.gaussians.push_back(g);
    }
    return scene;
}

AffineFit affine_fit(const Image& rendered_depth, const Image& pseudo_depth,
                     const Image& transmittance, double tau_w) {
    require_same_shape(rendered_depth, pseudo_depth, "affine_fit");
    require_same_shape(rendered_depth, transmittance, "affine_fit transmittance");

    // first pass: means over omega_w
    double sum_p = 0.0, sum_r = 0.0;
    long count = 0;
    double pmin = 0.0, pmax = 0.0;
    for (size_t i = 0; i < rendered_depth.size(); ++i) {
        if (transmittance.data[i] >= tau_w) continue;
        const double p = pseudo_depth.data[i];
        if (count == 0) pmin = pmax = p;
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
        sum_p += p;
        sum_r += rendered_depth.data[i];
        ++count;
    }
    if (count < 2)
        raise("DegenerateFit", "only " + std::to_string(count) + " pixels below tau_w");
    if (pmax - pmin <= 1e-12 * std::max(1.0, std::abs(pmax)))
        raise("DegenerateFit", "pseudo-depth constant over omega_w");

    const double mean_p = sum_p / count, mean_r = sum_r / count;
    double spp = 0.0, spr = 0.0;
    for (size_t i = 0; i < rendered_depth.size(); ++i) {
        if (transmittance.data[i] >= tau_w) continue;
        const double dp = pseudo_depth.data[i] - mean_p;
        spp += dp * dp;
        spr += dp * (rendered_depth.data[i] - mean_r);
    }

    AffineFit fit;
    fit.k = spr / spp;
    fit.b = mean_r - fit.k * mean_p;
    fit.sample_count = count;

    double ss = 0.0;
    for (size_t i = 0; i < rendered_depth.size(); ++i) {
        if (transmittance.data[i] >= tau_w) continue;
        const double r = rendered_depth.data[i] - fit.k * pseudo_depth.data[i] - fit.b;
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / count);
    return fit;
}

RegionMasks region_masks(const Image& pseudo_depth, const Image& transmittance, double tau_w,
                         double tau_near) {
    require_same_shape(pseudo_depth, transmittance, "region_masks");
    RegionMasks m;
    m.width = pseudo_depth.width;
    m.height = pseudo_depth.height;
    const size_t n = pseudo_depth.size();
    m.omega_w.resize(n);
    m.omega_p.resize(n);
    m.omega_n.resize(n);

    double pmax = 0.0;
    for (size_t i = 0; i < n; ++i) pmax = std::max(pmax, pseudo_depth.data[i]);
    const double near_cut = tau_near * pmax;

    for (size_t i = 0; i < n; ++i) {
        const bool poorly = transmittance.data[i] >= tau_w;
        m.omega_p[i] = poorly;
        m.omega_w[i] = !poorly;
        m.omega_n[i] = pseudo_depth.data[i] < near_cut;
    }
    return m;
}

std::vector<GaussianPrimitive> complement(const Camera& camera, const Image& pseudo_depth,
                                          const RenderOutput& rendered, const Image& target,
                                          const AffineFit& fit, const PdgcConfig& config) {
    const auto masks = region_masks(pseudo_depth, rendered.transmittance, config.tau_w,
                                    config.tau_near);
    std::vector<GaussianPrimitive> inserted;

    for (int py = 0; py < camera.height; py += config.stride) {
        for (int px = 0; px < camera.width; px += config.stride) {
            if (static_cast<int>(inserted.size()) >= config.max_insertions) return inserted;
            const size_t i = static_cast<size_t>(py) * camera.width + px;
            if (!(masks.omega_n[i] && masks.omega_p[i])) continue;

            const double corrected =
                std::max(config.near_clip, fit.k * pseudo_depth.at(px, py) + fit.b);

            GaussianPrimitive g;
            g.position = unproject_pixel(camera, Vec2(px + 0.5, py + 0.5), corrected);
            g.log_scale = Vec3::Constant(std::log(
                std::max(corrected / camera.fx * config.stride, 1e-6)));
            g.opacity_logit = logit(config.insert_opacity);
            const Vec3 dc = sh_dc_from_color(target.rgb(px, py));
            for (int ch = 0; ch < 3; ++ch) g.color_sh(0, ch) = dc[ch];
            inserted.push_back(g);
        }
    }
    return inserted;
}

}  // namespace medsplat

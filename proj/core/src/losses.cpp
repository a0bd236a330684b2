#include "medsplat/losses.hpp"

#include "ssim_engine.hpp"

namespace medsplat {

DepthRankMode depth_rank_mode_from_string(const std::string& s) {
    if (s == "hinge") return DepthRankMode::hinge;
    if (s == "literal") return DepthRankMode::literal;
    raise("UnknownMode", "depth rank mode '" + s + "'");
}

std::string to_string(DepthRankMode mode) {
    return mode == DepthRankMode::hinge ? "hinge" : "literal";
}

Image weight_matrix(const Image& rendered, double epsilon) {
    Image W = rendered;
    for (double& v : W.data) v = 1.0 / (v + epsilon);
    return W;
}

double loss_reg_l1(const Image& rendered, const Image& target, const Image& W,
                   Image* d_rendered) {
    require_same_shape(rendered, target, "loss_reg_l1");
    require_same_shape(rendered, W, "loss_reg_l1 weights");
    const double inv_n = 1.0 / static_cast<double>(rendered.size());
    if (d_rendered) *d_rendered = Image(rendered.width, rendered.height, rendered.channels);

    double sum = 0.0;
    for (size_t i = 0; i < rendered.size(); ++i) {
        const double diff = W.data[i] * (rendered.data[i] - target.data[i]);
        sum += std::abs(diff);
        if (d_rendered)
            d_rendered->data[i] =
                W.data[i] * (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) * inv_n;
    }
    return sum * inv_n;
}

double loss_reg_ms_ssim(const Image& rendered, const Image& target, const Image& W,
                        bool single_scale, Image* d_rendered) {
    require_same_shape(rendered, target, "loss_reg_ms_ssim");
    require_same_shape(rendered, W, "loss_reg_ms_ssim weights");

    Image x = rendered, y = target;
    std::vector<uint8_t> gate(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double wx = W.data[i] * rendered.data[i];
        const double wy = W.data[i] * target.data[i];
        gate[i] = wx < 10.0;
        x.data[i] = std::min(std::max(wx, 0.0), 10.0);
        y.data[i] = std::min(std::max(wy, 0.0), 10.0);
    }

    const int scales = single_scale ? 1 : detail::ms_ssim_scales(x.width, x.height);
    Image dx;
    const double value = detail::ms_ssim_value(x, y, scales, d_rendered ? &dx : nullptr);
    if (d_rendered) {
        *d_rendered = Image(x.width, x.height, x.channels);
        for (size_t i = 0; i < x.size(); ++i)
            d_rendered->data[i] = gate[i] ? -dx.data[i] * W.data[i] : 0.0;
    }
    return 1.0 - value;
}

Image downsample_area(const Image& map, int n) {
    if (map.empty()) raise("ShapeMismatch", "downsample_area: empty map");
    Image out(n, n, map.channels);
    for (int cy = 0; cy < n; ++cy) {
        const int y0 = cy * map.height / n, y1 = (cy + 1) * map.height / n;
        for (int cx = 0; cx < n; ++cx) {
            const int x0 = cx * map.width / n, x1 = (cx + 1) * map.width / n;
            for (int c = 0; c < map.channels; ++c) {
                double sum = 0.0;
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x) sum += map.at(x, y, c);
                const int count = (y1 - y0) * (x1 - x0);
                out.at(cx, cy, c) = count > 0 ? sum / count : 0.0;
            }
        }
    }
    return out;
}

double loss_depth_rank(const Image& rendered_depth, const Image& pseudo_depth, int n,
                       DepthRankMode mode, Image* d_rendered_depth) {
    require_same_shape(rendered_depth, pseudo_depth, "loss_depth_rank");
    if (n < 2) raise("ShapeMismatch", "loss_depth_rank: n must be >= 2");

    const Image ref = downsample_area(pseudo_depth, n);
    const Image est = downsample_area(rendered_depth, n);
    const int cells = n * n;
    const double inv_n4 = 1.0 / (static_cast<double>(cells) * cells);

    std::vector<double> d_cells(cells, 0.0);
    double loss = 0.0;
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const double a = ref.data[i] - ref.data[j];
            const double b = est.data[i] - est.data[j];
            const double prod = a * b;
            if (mode == DepthRankMode::hinge) {
                if (-prod > 0.0) {
                    loss += -prod;
                    d_cells[i] += -a;
                    d_cells[j] += a;
                }
            } else {
                if (-prod < 0.0) {
                    loss += -prod;
                    d_cells[i] += -a;
                    d_cells[j] += a;
                }
            }
        }
    }
    loss *= inv_n4;

    if (d_rendered_depth) {
        *d_rendered_depth = Image(rendered_depth.width, rendered_depth.height, 1);
        for (int cy = 0; cy < n; ++cy) {
            const int y0 = cy * rendered_depth.height / n, y1 = (cy + 1) * rendered_depth.height / n;
            for (int cx = 0; cx < n; ++cx) {
                const int x0 = cx * rendered_depth.width / n, x1 = (cx + 1) * rendered_depth.width / n;
                const int count = (y1 - y0) * (x1 - x0);
                if (count == 0) continue;
                const double g = d_cells[cy * n + cx] * inv_n4 / count;
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x) d_rendered_depth->at(x, y) += g;
            }
        }
    }
    return loss;
}

LossResult total_loss_with_weight(const Image& rendered_color, const Image& rendered_depth,
                                  const Image& target, const Image* pseudo_depth, const Image& W,
                                  const LossWeights& weights) {
    LossResult r;
    Image g_l1, g_ssim;
    r.l1 = loss_reg_l1(rendered_color, target, W, &g_l1);
    r.ms_ssim = loss_reg_ms_ssim(rendered_color, target, W, weights.single_scale_ssim, &g_ssim);

    r.d_color = Image(rendered_color.width, rendered_color.height, rendered_color.channels);
    for (size_t i = 0; i < r.d_color.size(); ++i)
        r.d_color.data[i] = weights.lambda_l1 * g_l1.data[i] + weights.lambda_ssim * g_ssim.data[i];

    r.total = weights.lambda_l1 * r.l1 + weights.lambda_ssim * r.ms_ssim;

    if (pseudo_depth && weights.lambda_depth > 0.0) {
        Image g_depth;
        r.depth = loss_depth_rank(rendered_depth, *pseudo_depth, weights.patch_n,
                                  weights.rank_mode, &g_depth);
        r.d_depth = Image(rendered_depth.width, rendered_depth.height, 1);
        for (size_t i = 0; i < r.d_depth.size(); ++i)
            r.d_depth.data[i] = weights.lambda_depth * g_depth.data[i];
        r.total += weights.lambda_depth * r.depth;
    }
    return r;
}

LossResult total_loss(const RenderOutput& rendered, const Image& target,
                      const Image* pseudo_depth, const LossWeights& weights) {
    const Image W = weight_matrix(rendered.color, weights.epsilon);
    return total_loss_with_weight(rendered.color, rendered.depth, target, pseudo_depth, W,
                                  weights);
}

}  // namespace medsplat

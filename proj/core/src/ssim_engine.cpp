#include "ssim_engine.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace medsplat::detail {

namespace {

constexpr int kHalf = kSsimWindow / 2;
constexpr double kScaleGuard = 1e-6;

std::array<double, kSsimWindow> gaussian_taps() {
    std::array<double, kSsimWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - kHalf;
        w[i] = std::exp(-0.5 * d * d / (kSsimSigma * kSsimSigma));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

const std::array<double, kSsimWindow>& taps() {
    static const auto t = gaussian_taps();
    return t;
}

// Per-position sums of in-bounds taps along one axis.
std::vector<double> axis_norms(int n) {
    const auto& w = taps();
    std::vector<double> norm(n, 0.0);
    for (int p = 0; p < n; ++p) {
        double s = 0.0;
        for (int k = 0; k < kSsimWindow; ++k) {
            const int q = p + k - kHalf;
            if (q >= 0 && q < n) s += w[k];
        }
        norm[p] = s;
    }
    return norm;
}

// Border-renormalized separable convolution.
Image conv_window(const Image& in, const std::vector<double>& nx,
                  const std::vector<double>& ny) {
    const auto& w = taps();
    const int W = in.width, H = in.height, C = in.channels;
    Image tmp(W, H, C), out(W, H, C);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double s = 0.0;
                for (int k = 0; k < kSsimWindow; ++k) {
                    const int q = x + k - kHalf;
                    if (q >= 0 && q < W) s += w[k] * in.at(q, y, c);
                }
                tmp.at(x, y, c) = s / nx[x];
            }
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double s = 0.0;
                for (int k = 0; k < kSsimWindow; ++k) {
                    const int q = y + k - kHalf;
                    if (q >= 0 && q < H) s += w[k] * tmp.at(x, q, c);
                }
                out.at(x, y, c) = s / ny[y];
            }
    return out;
}

// Adjoint of conv_window: divide by the output-position norms, then correlate
// with the (symmetric) kernel without renormalizing.
Image conv_window_adjoint(const Image& up, const std::vector<double>& nx,
                          const std::vector<double>& ny) {
    const auto& w = taps();
    const int W = up.width, H = up.height, C = up.channels;
    Image tmp(W, H, C), out(W, H, C);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double s = 0.0;
                for (int k = 0; k < kSsimWindow; ++k) {
                    const int q = y + k - kHalf;
                    if (q >= 0 && q < H) s += w[k] * up.at(x, q, c) / ny[q];
                }
                tmp.at(x, y, c) = s;
            }
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double s = 0.0;
                for (int k = 0; k < kSsimWindow; ++k) {
                    const int q = x + k - kHalf;
                    if (q >= 0 && q < W) s += w[k] * tmp.at(q, y, c) / nx[q];
                }
                out.at(x, y, c) = s;
            }
    return out;
}

Image avg_pool2(const Image& in) {
    const int W = in.width / 2, H = in.height / 2, C = in.channels;
    Image out(W, H, C);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c)
                out.at(x, y, c) = 0.25 * (in.at(2 * x, 2 * y, c) + in.at(2 * x + 1, 2 * y, c) +
                                          in.at(2 * x, 2 * y + 1, c) +
                                          in.at(2 * x + 1, 2 * y + 1, c));
    return out;
}

void avg_pool2_adjoint(const Image& up, Image& down_grad) {
    for (int y = 0; y < up.height; ++y)
        for (int x = 0; x < up.width; ++x)
            for (int c = 0; c < up.channels; ++c) {
                const double v = 0.25 * up.at(x, y, c);
                down_grad.at(2 * x, 2 * y, c) += v;
                down_grad.at(2 * x + 1, 2 * y, c) += v;
                down_grad.at(2 * x, 2 * y + 1, c) += v;
                down_grad.at(2 * x + 1, 2 * y + 1, c) += v;
            }
}

struct ScaleMaps {
    Image x, y;
    Image mu_x, mu_y, vx, vy, vxy;
    Image cs, l;
    double mean_cs = 0.0, mean_lcs = 0.0;
    std::vector<double> nx, ny;
};

void compute_scale(ScaleMaps& m, bool with_luminance) {
    m.nx = axis_norms(m.x.width);
    m.ny = axis_norms(m.x.height);
    m.mu_x = conv_window(m.x, m.nx, m.ny);
    m.mu_y = conv_window(m.y, m.nx, m.ny);

    Image xx = m.x, yy = m.y, xy = m.x;
    for (size_t i = 0; i < xx.data.size(); ++i) {
        xx.data[i] *= m.x.data[i];
        yy.data[i] *= m.y.data[i];
        xy.data[i] *= m.y.data[i];
    }
    const Image sxx = conv_window(xx, m.nx, m.ny);
    const Image syy = conv_window(yy, m.nx, m.ny);
    const Image sxy = conv_window(xy, m.nx, m.ny);

    const size_t n = m.x.data.size();
    m.vx = m.mu_x;
    m.vy = m.mu_y;
    m.vxy = m.mu_x;
    m.cs = m.mu_x;
    m.l = m.mu_x;
    double sum_cs = 0.0, sum_lcs = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double mx = m.mu_x.data[i], my = m.mu_y.data[i];
        const double vx = sxx.data[i] - mx * mx;
        const double vy = syy.data[i] - my * my;
        const double vxy = sxy.data[i] - mx * my;
        const double cs = (2.0 * vxy + kSsimC2) / (vx + vy + kSsimC2);
        const double l = (2.0 * mx * my + kSsimC1) / (mx * mx + my * my + kSsimC1);
        m.vx.data[i] = vx;
        m.vy.data[i] = vy;
        m.vxy.data[i] = vxy;
        m.cs.data[i] = cs;
        m.l.data[i] = l;
        sum_cs += cs;
        sum_lcs += l * cs;
    }
    m.mean_cs = sum_cs / static_cast<double>(n);
    m.mean_lcs = sum_lcs / static_cast<double>(n);
    (void)with_luminance;
}

// dValue/d(x at this scale) given per-pixel dcs and dl upstream maps.
Image scale_backward(const ScaleMaps& m, const Image& d_cs, const Image& d_l) {
    const size_t n = m.x.data.size();
    Image d_mu(m.x.width, m.x.height, m.x.channels);
    Image d_sxx(m.x.width, m.x.height, m.x.channels);
    Image d_sxy(m.x.width, m.x.height, m.x.channels);

    for (size_t i = 0; i < n; ++i) {
        const double mx = m.mu_x.data[i], my = m.mu_y.data[i];
        const double vx = m.vx.data[i], vy = m.vy.data[i], vxy = m.vxy.data[i];
        const double denc = vx + vy + kSsimC2;
        const double ucs = d_cs.data[i];
        const double dvxy = 2.0 * ucs / denc;
        const double dvx = -ucs * (2.0 * vxy + kSsimC2) / (denc * denc);

        const double denl = mx * mx + my * my + kSsimC1;
        const double ul = d_l.data[i];
        const double dmul =
            ul * (2.0 * my * denl - (2.0 * mx * my + kSsimC1) * 2.0 * mx) / (denl * denl);

        d_mu.data[i] = dmul - 2.0 * mx * dvx - my * dvxy;
        d_sxx.data[i] = dvx;
        d_sxy.data[i] = dvxy;
    }

    Image dx = conv_window_adjoint(d_mu, m.nx, m.ny);
    const Image axx = conv_window_adjoint(d_sxx, m.nx, m.ny);
    const Image axy = conv_window_adjoint(d_sxy, m.nx, m.ny);
    for (size_t i = 0; i < n; ++i)
        dx.data[i] += 2.0 * m.x.data[i] * axx.data[i] + m.y.data[i] * axy.data[i];
    return dx;
}

}  // namespace

int ms_ssim_scales(int width, int height) {
    const int mn = std::min(width, height);
    int s = 1;
    while (s < 5 && (mn >> s) >= kSsimWindow) ++s;
    return s;
}

double ms_ssim_value(const Image& x, const Image& y, int scales, Image* dx) {
    require_same_shape(x, y, "ms_ssim");
    const int S = std::max(1, scales);

    std::vector<double> weights(S);
    double wsum = 0.0;
    for (int s = 0; s < S; ++s) wsum += kMsWeights5[s];
    for (int s = 0; s < S; ++s) weights[s] = kMsWeights5[s] / wsum;

    std::vector<ScaleMaps> maps(S);
    maps[0].x = x;
    maps[0].y = y;
    for (int s = 0; s < S; ++s) {
        compute_scale(maps[s], s == S - 1);
        if (s + 1 < S) {
            maps[s + 1].x = avg_pool2(maps[s].x);
            maps[s + 1].y = avg_pool2(maps[s].y);
        }
    }

    // guarded per-scale factors
    std::vector<double> g(S);
    double value = 1.0;
    for (int s = 0; s < S; ++s) {
        const double raw = (s == S - 1) ? maps[s].mean_lcs : maps[s].mean_cs;
        g[s] = std::max(raw, kScaleGuard);
        value *= std::pow(g[s], weights[s]);
    }

    if (!dx) return value;

    // dvalue/dg_s = value * w_s / g_s (zero when the guard clipped)
    Image grad_next;  // dvalue/dx at scale s+1, pending upsample
    for (int s = S - 1; s >= 0; --s) {
        const auto& m = maps[s];
        const double raw = (s == S - 1) ? m.mean_lcs : m.mean_cs;
        const double dg = raw > kScaleGuard ? value * weights[s] / g[s] : 0.0;
        const double per_pixel = dg / static_cast<double>(m.x.data.size());

        Image d_cs(m.x.width, m.x.height, m.x.channels);
        Image d_l(m.x.width, m.x.height, m.x.channels);
        if (s == S - 1) {
            for (size_t i = 0; i < m.x.data.size(); ++i) {
                d_cs.data[i] = per_pixel * m.l.data[i];
                d_l.data[i] = per_pixel * m.cs.data[i];
            }
        } else {
            for (size_t i = 0; i < m.x.data.size(); ++i) d_cs.data[i] = per_pixel;
        }

        Image dxs = scale_backward(m, d_cs, d_l);
        if (!grad_next.empty()) avg_pool2_adjoint(grad_next, dxs);
        grad_next = std::move(dxs);
    }
    *dx = std::move(grad_next);
    return value;
}

}  // namespace medsplat::detail

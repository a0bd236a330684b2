#pragma once

#include "medsplat/medium.hpp"
#include "medsplat/scene.hpp"

#include <array>
#include <vector>

namespace medsplat {

// Pixels whose accumulated object alpha stays below this are reported with the
// depth-0 convention.
inline constexpr double kDepthGuard = 1e-6;

struct RenderOptions {
    bool restored = false;            // also emit the medium-free object image
    double alpha_min = 1.0 / 255.0;   // fragments below this are skipped
    double alpha_max = 0.999;         // fragments clamp here
    double near_clip = kNearClip;
    bool early_stop = false;          // fast path; the reference path keeps the
    double early_stop_T = 1e-4;       // full product for the depth normalization
    int threads = 0;                  // 0 = hardware concurrency
};

struct RenderOutput {
    Image color;          // H x W x 3, linear, >= 0
    Image depth;          // H x W, world units; 0 where nothing contributes
    Image transmittance;  // H x W, residual object transmittance in [0,1]
    Image restored;       // H x W x 3 when requested, else empty
};

// dLoss/dRenderOutput; any image may be left empty for "no gradient".
struct RenderUpstream {
    Image d_color;
    Image d_depth;
    Image d_transmittance;
    Image d_restored;
};

struct MediumGradients {
    std::array<ShMatrix, 8> c_med{};
    std::array<ShMatrix, 8> sigma_att{};
    std::array<ShMatrix, 8> sigma_bs{};

    void set_zero() {
        for (int i = 0; i < 8; ++i) {
            c_med[i].setZero();
            sigma_att[i].setZero();
            sigma_bs[i].setZero();
        }
    }
    std::array<ShMatrix, 8>& field(MediumField f) {
        switch (f) {
            case MediumField::c_med: return c_med;
            case MediumField::sigma_att: return sigma_att;
            default: return sigma_bs;
        }
    }
};

struct Gradients {
    std::vector<Vec3> d_position;
    std::vector<Vec4> d_rotation;  // (w, x, y, z), tangent to the unit sphere
    std::vector<Vec3> d_log_scale;
    std::vector<double> d_opacity_logit;
    std::vector<ShMatrix> d_color_sh;
    MediumGradients medium;

    // Densification statistics: per-pixel |dL/dmean2d| accumulated
    // component-wise, plus whether the primitive contributed to this view.
    std::vector<Vec2> abs_grad_mean2d;
    std::vector<uint8_t> visible;

    void resize(size_t n) {
        d_position.assign(n, Vec3::Zero());
        d_rotation.assign(n, Vec4::Zero());
        d_log_scale.assign(n, Vec3::Zero());
        d_opacity_logit.assign(n, 0.0);
        d_color_sh.assign(n, ShMatrix::Zero());
        abs_grad_mean2d.assign(n, Vec2::Zero());
        visible.assign(n, 0);
        medium.set_zero();
    }
};

// Forward rendering of the medium-aware compositing equation: attenuated object
// color, per-segment backscatter, residual transmittance, alpha-blended depth.
RenderOutput render(const Scene& scene, const MediumGrid& medium, const Camera& camera,
                    const RenderOptions& opts = {});

// Plain alpha blending over a constant background; the restored channel of
// render() equals this with a black background.
RenderOutput render_vanilla(const Scene& scene, const Camera& camera, const Vec3& background,
                            const RenderOptions& opts = {});

// Exact analytic adjoint of render() for every learnable parameter. Recomputes
// the forward chain internally; `opts` must match the forward call.
Gradients render_backward(const Scene& scene, const MediumGrid& medium, const Camera& camera,
                          const RenderOptions& opts, const RenderUpstream& upstream);

}  // namespace medsplat

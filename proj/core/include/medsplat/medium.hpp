#pragma once

#include "medsplat/common.hpp"
#include "medsplat/sh.hpp"

#include <array>
#include <string>

namespace medsplat {

// Ablation switches for the medium representation. dir_and_pos is the full
// model; the restricted modes drop the positional interpolation, the
// directional bands, or both.
enum class MediumMode { no_dir_no_pos, pos_only, dir_only, dir_and_pos };

MediumMode medium_mode_from_string(const std::string& s);  // throws UnknownMode
std::string to_string(MediumMode mode);

enum class MediumField { c_med, sigma_att, sigma_bs };

// Per-ray medium parameters after activation.
struct MediumSample {
    Vec3 c_med = Vec3::Zero();      // in (0,1) per channel
    Vec3 sigma_att = Vec3::Zero();  // >= 0, inverse world distance
    Vec3 sigma_bs = Vec3::Zero();   // >= 0
};

// A single normalized cell: eight corner vertices, each holding full SH
// coefficient sets for medium color, attenuation and backscatter. Corner index
// packs the (u,v,w) in {-1,1}^3 signs as bit 0 = u > 0, bit 1 = v > 0,
// bit 2 = w > 0.
struct MediumGrid {
    std::array<ShMatrix, 8> c_med{};
    std::array<ShMatrix, 8> sigma_att{};
    std::array<ShMatrix, 8> sigma_bs{};
    Bounds bounds;
    MediumMode mode = MediumMode::dir_and_pos;

    const std::array<ShMatrix, 8>& field(MediumField f) const {
        switch (f) {
            case MediumField::c_med: return c_med;
            case MediumField::sigma_att: return sigma_att;
            default: return sigma_bs;
        }
    }
    std::array<ShMatrix, 8>& field(MediumField f) {
        switch (f) {
            case MediumField::c_med: return c_med;
            case MediumField::sigma_att: return sigma_att;
            default: return sigma_bs;
        }
    }

    // Near-clear start: DC set so the activated values hit the targets, all
    // higher bands zero, identical corners.
    static MediumGrid init(const Bounds& bounds, MediumMode mode,
                           const Vec3& c_med_target = Vec3(0.3, 0.3, 0.3),
                           const Vec3& sigma_target = Vec3(0.05, 0.05, 0.05));
};

// Affine map of bounds onto [-1,1]^3, clamped for positions outside.
Vec3 normalize_position(const Bounds& bounds, const Vec3& world_pos);

inline Vec3 corner_sign(int corner) {
    return Vec3((corner & 1) ? 1.0 : -1.0, (corner & 2) ? 1.0 : -1.0, (corner & 4) ? 1.0 : -1.0);
}

// Weights (1/8)(1 + u x)(1 + v y)(1 + w z); throws OutOfRangePosition when a
// component exceeds [-1,1] beyond 1e-9.
std::array<double, 8> trilinear_weights(const Vec3& npos);

ShMatrix interpolate_coeffs(const MediumGrid& grid, const Vec3& npos, MediumField field);

// Everything the backward pass needs to route gradients to corner coefficients:
// the interpolation weights and the (possibly DC-masked) basis actually used,
// plus raw pre-activation values.
struct MediumEvalContext {
    std::array<double, 8> weights{};
    ShVec basis = ShVec::Zero();
    Vec3 raw_c_med = Vec3::Zero();
    Vec3 raw_sigma_att = Vec3::Zero();
    Vec3 raw_sigma_bs = Vec3::Zero();
};

// One sample per ray: c_med = sigmoid(sh), sigmas = softplus(sh). Position is
// the observer (normalized by grid bounds), direction the world-space ray.
MediumSample medium_eval(const MediumGrid& grid, const Vec3& world_pos, const Vec3& direction,
                         MediumEvalContext* ctx = nullptr);

// Activated DC-band response per field/channel: what the grid reports for a
// homogeneous medium. Used by the CLI reports and recovery checks.
struct MediumDcSummary {
    Vec3 c_med, sigma_att, sigma_bs;
};
MediumDcSummary medium_dc_summary(const MediumGrid& grid);

}  // namespace medsplat

#pragma once

#include "medsplat/render.hpp"

#include <span>

namespace medsplat {

// Flattened views over the learnable state, shared by the optimizer, the
// checkpoint writer and the finite-difference harness. Layouts are fixed:
//   position   N x 3            rotation  N x 4 (w,x,y,z)
//   log_scale  N x 3            opacity   N x 1
//   color_sh   N x 48 (16 coeffs x 3 channels, channel-major per coeff? no:
//              column-major per Eigen default is fine as long as pack/unpack
//              agree; we use coeff-major: [coeff][channel])
//   medium_*   8 corners x 48, same per-corner layout
enum class ParamGroup {
    position,
    rotation,
    log_scale,
    opacity,
    color_sh,
    medium_c_med,
    medium_sigma_att,
    medium_sigma_bs,
};

inline constexpr ParamGroup kAllParamGroups[] = {
    ParamGroup::position,     ParamGroup::rotation,         ParamGroup::log_scale,
    ParamGroup::opacity,      ParamGroup::color_sh,         ParamGroup::medium_c_med,
    ParamGroup::medium_sigma_att, ParamGroup::medium_sigma_bs,
};

const char* to_string(ParamGroup g);

size_t group_size(size_t n_gaussians, ParamGroup g);

void pack_params(const Scene& scene, const MediumGrid& medium, ParamGroup g,
                 std::span<double> out);
void unpack_params(Scene& scene, MediumGrid& medium, ParamGroup g, std::span<const double> in);
void pack_grads(const Gradients& grads, ParamGroup g, std::span<double> out);

}  // namespace medsplat

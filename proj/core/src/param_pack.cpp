#include "medsplat/param_pack.hpp"

namespace medsplat {

const char* to_string(ParamGroup g) {
    switch (g) {
        case ParamGroup::position: return "position";
        case ParamGroup::rotation: return "rotation";
        case ParamGroup::log_scale: return "log_scale";
        case ParamGroup::opacity: return "opacity";
        case ParamGroup::color_sh: return "color_sh";
        case ParamGroup::medium_c_med: return "medium_c_med";
        case ParamGroup::medium_sigma_att: return "medium_sigma_att";
        default: return "medium_sigma_bs";
    }
}

size_t group_size(size_t n, ParamGroup g) {
    switch (g) {
        case ParamGroup::position: return n * 3;
        case ParamGroup::rotation: return n * 4;
        case ParamGroup::log_scale: return n * 3;
        case ParamGroup::opacity: return n;
        case ParamGroup::color_sh: return n * kShCoeffCount * 3;
        default: return 8u * kShCoeffCount * 3;
    }
}

namespace {

void check_size(size_t want, size_t got, ParamGroup g) {
    if (want != got)
        raise("ShapeMismatch", std::string("param group ") + to_string(g) + ": expected " +
                                   std::to_string(want) + " values, got " + std::to_string(got));
}

void pack_sh(const ShMatrix& m, double* out) {
    for (int k = 0; k < kShCoeffCount; ++k)
        for (int ch = 0; ch < 3; ++ch) out[k * 3 + ch] = m(k, ch);
}

void unpack_sh(ShMatrix& m, const double* in) {
    for (int k = 0; k < kShCoeffCount; ++k)
        for (int ch = 0; ch < 3; ++ch) m(k, ch) = in[k * 3 + ch];
}

template <typename CornerArray>
void pack_corners(const CornerArray& corners, std::span<double> out) {
    for (int c = 0; c < 8; ++c) pack_sh(corners[c], out.data() + c * kShCoeffCount * 3);
}

template <typename CornerArray>
void unpack_corners(CornerArray& corners, std::span<const double> in) {
    for (int c = 0; c < 8; ++c) unpack_sh(corners[c], in.data() + c * kShCoeffCount * 3);
}

}  // namespace

void pack_params(const Scene& scene, const MediumGrid& medium, ParamGroup g,
                 std::span<double> out) {
    const size_t n = scene.gaussians.size();
    check_size(group_size(n, g), out.size(), g);
    switch (g) {
        case ParamGroup::position:
            for (size_t i = 0; i < n; ++i)
                for (int a = 0; a < 3; ++a) out[i * 3 + a] = scene.gaussians[i].position[a];
            break;
        case ParamGroup::rotation:
            for (size_t i = 0; i < n; ++i) {
                const Quat& q = scene.gaussians[i].rotation;
                out[i * 4 + 0] = q.w();
                out[i * 4 + 1] = q.x();
                out[i * 4 + 2] = q.y();
                out[i * 4 + 3] = q.z();
            }
            break;
        case ParamGroup::log_scale:
            for (size_t i = 0; i < n; ++i)
                for (int a = 0; a < 3; ++a) out[i * 3 + a] = scene.gaussians[i].log_scale[a];
            break;
        case ParamGroup::opacity:
            for (size_t i = 0; i < n; ++i) out[i] = scene.gaussians[i].opacity_logit;
            break;
        case ParamGroup::color_sh:
            for (size_t i = 0; i < n; ++i)
                pack_sh(scene.gaussians[i].color_sh, out.data() + i * kShCoeffCount * 3);
            break;
        case ParamGroup::medium_c_med: pack_corners(medium.c_med, out); break;
        case ParamGroup::medium_sigma_att: pack_corners(medium.sigma_att, out); break;
        case ParamGroup::medium_sigma_bs: pack_corners(medium.sigma_bs, out); break;
    }
}

void unpack_params(Scene& scene, MediumGrid& medium, ParamGroup g, std::span<const double> in) {
    const size_t n = scene.gaussians.size();
    check_size(group_size(n, g), in.size(), g);
    switch (g) {
        case ParamGroup::position:
            for (size_t i = 0; i < n; ++i)
                for (int a = 0; a < 3; ++a) scene.gaussians[i].position[a] = in[i * 3 + a];
            break;
        case ParamGroup::rotation:
            for (size_t i = 0; i < n; ++i)
                scene.gaussians[i].rotation =
                    Quat(in[i * 4 + 0], in[i * 4 + 1], in[i * 4 + 2], in[i * 4 + 3]);
            break;
        case ParamGroup::log_scale:
            for (size_t i = 0; i < n; ++i)
                for (int a = 0; a < 3; ++a) scene.gaussians[i].log_scale[a] = in[i * 3 + a];
            break;
        case ParamGroup::opacity:
            for (size_t i = 0; i < n; ++i) scene.gaussians[i].opacity_logit = in[i];
            break;
        case ParamGroup::color_sh:
            for (size_t i = 0; i < n; ++i)
                unpack_sh(scene.gaussians[i].color_sh, in.data() + i * kShCoeffCount * 3);
            break;
        case ParamGroup::medium_c_med: unpack_corners(medium.c_med, in); break;
        case ParamGroup::medium_sigma_att: unpack_corners(medium.sigma_att, in); break;
        case ParamGroup::medium_sigma_bs: unpack_corners(medium.sigma_bs, in); break;
    }
}

void pack_grads(const Gradients& grads, ParamGroup g, std::span<double> out) {
    const size_t n = grads.d_position.size();
    check_size(group_size(n, g), out.size(), g);
    switch (g) {
        case ParamGroup::position:
            for (size_t i = 0; i < n; ++i)
                for (int a = 0; a < 3; ++a) out[i * 3 + a] = grads.d_position[i][a];
            break;
        case ParamGroup::rotation:
            for (size_t i = 0; i < n; ++i)
                for (int a = 0; a < 4; ++a) out[i * 4 + a] = grads.d_rotation[i][a];
            break;
        case ParamGroup::log_scale:
            for (size_t i = 0; i < n; ++i)
                for (int a = 0; a < 3; ++a) out[i * 3 + a] = grads.d_log_scale[i][a];
            break;
        case ParamGroup::opacity:
            for (size_t i = 0; i < n; ++i) out[i] = grads.d_opacity_logit[i];
            break;
        case ParamGroup::color_sh:
            for (size_t i = 0; i < n; ++i)
                pack_sh(grads.d_color_sh[i], out.data() + i * kShCoeffCount * 3);
            break;
        case ParamGroup::medium_c_med: pack_corners(grads.medium.c_med, out); break;
        case ParamGroup::medium_sigma_att: pack_corners(grads.medium.sigma_att, out); break;
        case ParamGroup::medium_sigma_bs: pack_corners(grads.medium.sigma_bs, out); break;
    }
}

}  // namespace medsplat

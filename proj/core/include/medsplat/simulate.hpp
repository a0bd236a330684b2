#pragma once

#include "medsplat/render.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace medsplat {

enum class PresetFamily { fog, water };
enum class PresetLevel { easy, medium, hard };

PresetFamily preset_family_from_string(const std::string& s);
PresetLevel preset_level_from_string(const std::string& s);

// Controllable degradation parameters. Fog is gray with equal attenuation and
// backscatter; water attenuates red fastest and backscatters blue-heavy.
struct MediumPreset {
    std::string name = "water_medium";
    Vec3 c_med = Vec3::Zero();
    Vec3 sigma_att = Vec3::Zero();
    Vec3 sigma_bs = Vec3::Zero();

    static MediumPreset make(PresetFamily family, PresetLevel level);
    static MediumPreset lerp(const MediumPreset& a, const MediumPreset& b, double t);
};

// Per-pixel image formation: direct transmission plus backscatter veil,
// clamped to [0,1]. Depths <= 0 are treated as infinitely far.
Image degrade(const Image& clean, const Image& depth, const MediumPreset& preset);

// Deterministic toy scene: a wavy opaque backdrop plus mid- and near-field
// blob clusters, colors varied, depths within [1, 10] from the camera ring.
Scene make_toy_scene(uint64_t seed, int n_primitives = 900);

// The camera ring the datasets are rendered from.
Camera make_orbit_camera(int view_index, int n_views, int resolution);

struct SimulateConfig {
    uint64_t seed = 1;
    MediumPreset preset = MediumPreset::make(PresetFamily::water, PresetLevel::medium);
    std::optional<MediumPreset> blend_to;  // vary the medium across the path
    int n_views = 16;
    int resolution = 64;
    int n_primitives = 900;
    double pseudo_noise = 0.01;
    int threads = 0;
};

// Renders the toy scene, applies the degradation, perturbs ground-truth depth
// into pseudo-depth, and writes images + cameras + points + manifest.
void make_dataset(const SimulateConfig& config, const std::filesystem::path& out_dir);

}  // namespace medsplat

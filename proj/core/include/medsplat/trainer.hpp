#pragma once

#include "medsplat/adam.hpp"
#include "medsplat/losses.hpp"
#include "medsplat/pdgc.hpp"
#include "medsplat/render.hpp"
#include "medsplat/rng.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <string>

namespace medsplat {

struct TrainConfig {
    int steps = 5000;

    // per-group learning rates; position decays exponentially to its final value
    double lr_position = 1.6e-4;
    double lr_position_final = 1.6e-6;
    double lr_rotation = 1e-3;
    double lr_log_scale = 5e-3;
    double lr_opacity = 5e-2;
    double lr_color_sh = 2.5e-3;
    double lr_medium = 1e-3;

    int densify_start = 500;
    double densify_until_frac = 0.6;  // of total steps
    int densify_interval = 100;
    double densify_grad_threshold = 4e-4;
    double prune_opacity = 5e-3;
    double split_factor = 1.6;
    double clone_split_scale_frac = 0.01;  // of scene extent
    int opacity_reset_interval = 3000;

    bool pdgc_enabled = true;
    int pdgc_step = 500;
    PdgcConfig pdgc;

    LossWeights loss;
    MediumMode medium_mode = MediumMode::dir_and_pos;
    Vec3 medium_init_c_med = Vec3(0.3, 0.3, 0.3);
    Vec3 medium_init_sigma = Vec3(0.05, 0.05, 0.05);

    uint64_t seed = 1;
    int threads = 0;
    int eval_interval = 500;
};

struct TrainView {
    std::string id;
    Camera camera;
    Image target;                       // degraded observation, float-exact
    std::optional<Image> pseudo_depth;  // affine-in-depth prior
};

struct TrainDataset {
    std::vector<TrainView> train;
    std::vector<TrainView> test;
    std::vector<PointRecord> points;
    std::optional<Bounds> bounds;
};

struct Checkpoint {
    int version = 1;
    long step = 0;
    Scene scene;
    MediumGrid medium;
    TrainConfig config;
    std::map<std::string, AdamState> adam;
};

// Densification statistics: accumulated per-view norms of the absolute
// positional screen gradients, normalized by observation count at decision time.
struct DensifyStats {
    std::vector<double> accum_norm;
    std::vector<long> count;

    void resize(size_t n) {
        accum_norm.assign(n, 0.0);
        count.assign(n, 0);
    }
    void observe(const Gradients& g) {
        for (size_t i = 0; i < accum_norm.size(); ++i) {
            if (!g.visible[i]) continue;
            accum_norm[i] += g.abs_grad_mean2d[i].norm();
            count[i] += 1;
        }
    }
};

// Result of one densify/prune pass: for every primitive of the new scene,
// which old primitive it derives from and whether its optimizer state should
// start fresh.
struct DensifyResult {
    Scene scene;
    std::vector<int> source;
    std::vector<uint8_t> is_new;
    int n_cloned = 0, n_split = 0, n_pruned = 0;
};

DensifyResult densify_and_prune(const Scene& scene, const DensifyStats& stats,
                                const TrainConfig& config, Rng& rng);

// Full optimization loop: render -> loss -> backward -> Adam, with
// densification, opacity resets, pseudo-depth complementation and a
// line-delimited loss log. Deterministic for a fixed (dataset, config, seed)
// and any worker count.
Checkpoint train(const TrainDataset& dataset, const TrainConfig& config,
                 std::ostream* log = nullptr);

}  // namespace medsplat

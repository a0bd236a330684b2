#include "medsplat/trainer.hpp"

#include "medsplat/metrics.hpp"
#include "medsplat/param_pack.hpp"

#include <algorithm>
#include <cstdio>

namespace medsplat {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double position_lr(const TrainConfig& c, int step) {
    if (c.steps <= 1) return c.lr_position;
    const double t = static_cast<double>(step) / c.steps;
    return c.lr_position * std::pow(c.lr_position_final / c.lr_position, t);
}

struct Optimizer {
    std::map<std::string, AdamState> states;
    std::vector<double> scratch_p, scratch_g;

    void step_group(Scene& scene, MediumGrid& medium, const Gradients& grads, ParamGroup g,
                    double lr) {
        const size_t n = group_size(scene.gaussians.size(), g);
        scratch_p.resize(n);
        scratch_g.resize(n);
        pack_params(scene, medium, g, scratch_p);
        pack_grads(grads, g, scratch_g);
        adam_step(scratch_p, scratch_g, states[to_string(g)], lr);
        unpack_params(scene, medium, g, scratch_p);
    }

    // keep rows for surviving primitives, zero rows for fresh ones
    void remap(const DensifyResult& result, size_t old_n) {
        static constexpr ParamGroup kPerPrimitive[] = {
            ParamGroup::position, ParamGroup::rotation, ParamGroup::log_scale,
            ParamGroup::opacity, ParamGroup::color_sh};
        for (ParamGroup g : kPerPrimitive) {
            auto it = states.find(to_string(g));
            if (it == states.end() || it->second.m.empty()) continue;
            AdamState& st = it->second;
            const size_t width = group_size(1, g);
            if (st.m.size() != old_n * width) continue;
            AdamState fresh;
            fresh.step = st.step;
            fresh.resize(result.scene.gaussians.size() * width);
            for (size_t i = 0; i < result.scene.gaussians.size(); ++i) {
                if (result.is_new[i]) continue;
                const size_t src = static_cast<size_t>(result.source[i]);
                for (size_t a = 0; a < width; ++a) {
                    fresh.m[i * width + a] = st.m[src * width + a];
                    fresh.v[i * width + a] = st.v[src * width + a];
                }
            }
            st = std::move(fresh);
        }
    }

    void zero_group(ParamGroup g) {
        auto it = states.find(to_string(g));
        if (it == states.end()) return;
        std::fill(it->second.m.begin(), it->second.m.end(), 0.0);
        std::fill(it->second.v.begin(), it->second.v.end(), 0.0);
    }
};

double eval_psnr(const Scene& scene, const MediumGrid& medium,
                 const std::vector<TrainView>& views, const RenderOptions& opts) {
    if (views.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& v : views) {
        const RenderOutput out = render(scene, medium, v.camera, opts);
        sum += psnr(out.color, v.target);
    }
    return sum / static_cast<double>(views.size());
}

}  // namespace

DensifyResult densify_and_prune(const Scene& scene, const DensifyStats& stats,
                                const TrainConfig& config, Rng& rng) {
    DensifyResult out;
    out.scene.bounds = scene.bounds;
    const double extent = scene.bounds.max_extent();
    const double size_cut = config.clone_split_scale_frac * extent;

    for (int i = 0; i < static_cast<int>(scene.gaussians.size()); ++i) {
        const auto& g = scene.gaussians[i];
        if (g.opacity() < config.prune_opacity) {
            out.n_pruned++;
            continue;
        }
        const double mean_grad =
            stats.count[i] > 0 ? stats.accum_norm[i] / static_cast<double>(stats.count[i]) : 0.0;
        const bool densify = mean_grad > config.densify_grad_threshold;
        const double max_scale = g.scale().maxCoeff();

        if (!densify) {
            out.scene.gaussians.push_back(g);
            out.source.push_back(i);
            out.is_new.push_back(0);
            continue;
        }
        if (max_scale <= size_cut) {
            // clone: keep the original, append a copy
            out.scene.gaussians.push_back(g);
            out.source.push_back(i);
            out.is_new.push_back(0);
            out.scene.gaussians.push_back(g);
            out.source.push_back(i);
            out.is_new.push_back(1);
            out.n_cloned++;
        } else {
            // split: two children sampled inside the parent, scales shrunk
            const Mat3 R = g.rotation.normalized().toRotationMatrix();
            const Vec3 s = g.scale();
            for (int child = 0; child < 2; ++child) {
                GaussianPrimitive c = g;
                const Vec3 xi(rng.normal(), rng.normal(), rng.normal());
                c.position = g.position + R * s.cwiseProduct(xi);
                c.log_scale = g.log_scale.array() - std::log(config.split_factor);
                out.scene.gaussians.push_back(c);
                out.source.push_back(i);
                out.is_new.push_back(1);
            }
            out.n_split++;
        }
    }
    return out;
}

Checkpoint train(const TrainDataset& dataset, const TrainConfig& config, std::ostream* log) {
    if (dataset.train.empty()) raise("EmptyDataset", "no training views");

    Checkpoint ck;
    ck.config = config;
    ck.scene = init_from_points(dataset.points, dataset.bounds);
    ck.medium = MediumGrid::init(ck.scene.bounds, config.medium_mode, config.medium_init_c_med,
                                 config.medium_init_sigma);

    RenderOptions ropts;
    ropts.threads = config.threads;

    Optimizer opt;
    DensifyStats stats;
    stats.resize(ck.scene.gaussians.size());
    Rng rng(config.seed);

    const int densify_end = static_cast<int>(config.densify_until_frac * config.steps);

    if (log)
        *log << "step,loss,l1,ms_ssim,depth,psnr,primitives\n";

    for (int step = 1; step <= config.steps; ++step) {
        const TrainView& view = dataset.train[(step - 1) % dataset.train.size()];

        const RenderOutput out = render(ck.scene, ck.medium, view.camera, ropts);
        const Image* pseudo = view.pseudo_depth ? &*view.pseudo_depth : nullptr;
        const LossResult loss = total_loss(out, view.target, pseudo, config.loss);
        if (!std::isfinite(loss.total))
            raise("NonFiniteLoss", "at step " + std::to_string(step));

        RenderUpstream up;
        up.d_color = loss.d_color;
        if (!loss.d_depth.empty()) up.d_depth = loss.d_depth;
        const Gradients grads =
            render_backward(ck.scene, ck.medium, view.camera, ropts, up);

        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::position,
                       position_lr(config, step));
        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::rotation, config.lr_rotation);
        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::log_scale, config.lr_log_scale);
        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::opacity, config.lr_opacity);
        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::color_sh, config.lr_color_sh);
        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::medium_c_med, config.lr_medium);
        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::medium_sigma_att,
                       config.lr_medium);
        opt.step_group(ck.scene, ck.medium, grads, ParamGroup::medium_sigma_bs, config.lr_medium);

        for (auto& g : ck.scene.gaussians) g.rotation.normalize();
        stats.observe(grads);

        if (config.pdgc_enabled && step == config.pdgc_step) {
            std::vector<GaussianPrimitive> inserted;
            for (const auto& tv : dataset.train) {
                const RenderOutput ro = render(ck.scene, ck.medium, tv.camera, ropts);
                if (!tv.pseudo_depth) continue;
                try {
                    const AffineFit fit = affine_fit(ro.depth, *tv.pseudo_depth,
                                                     ro.transmittance, config.pdgc.tau_w);
                    auto extra = complement(tv.camera, *tv.pseudo_depth, ro, tv.target, fit,
                                            config.pdgc);
                    inserted.insert(inserted.end(), extra.begin(), extra.end());
                } catch (const Error& e) {
                    if (e.kind() != "DegenerateFit") throw;
                }
            }
            if (!inserted.empty()) {
                DensifyResult grow;
                grow.scene = ck.scene;
                grow.source.resize(ck.scene.gaussians.size());
                grow.is_new.assign(ck.scene.gaussians.size(), 0);
                for (size_t i = 0; i < grow.source.size(); ++i) grow.source[i] = static_cast<int>(i);
                for (const auto& g : inserted) {
                    grow.scene.gaussians.push_back(g);
                    grow.source.push_back(-1);
                    grow.is_new.push_back(1);
                }
                const size_t old_n = ck.scene.gaussians.size();
                ck.scene = grow.scene;
                opt.remap(grow, old_n);
                stats.resize(ck.scene.gaussians.size());
            }
        }

        if (step >= config.densify_start && step <= densify_end &&
            step % config.densify_interval == 0) {
            const size_t old_n = ck.scene.gaussians.size();
            DensifyResult result = densify_and_prune(ck.scene, stats, config, rng);
            opt.remap(result, old_n);
            ck.scene = std::move(result.scene);
            stats.resize(ck.scene.gaussians.size());
        }

        if (config.opacity_reset_interval > 0 && step % config.opacity_reset_interval == 0 &&
            step < config.steps) {
            const double cap = logit(0.01);
            for (auto& g : ck.scene.gaussians)
                g.opacity_logit = std::min(g.opacity_logit, cap);
            opt.zero_group(ParamGroup::opacity);
        }

        if (log) {
            *log << step << ',' << fmt17(loss.total) << ',' << fmt17(loss.l1) << ','
                 << fmt17(loss.ms_ssim) << ',' << fmt17(loss.depth) << ',';
            const bool eval_now =
                config.eval_interval > 0 &&
                (step % config.eval_interval == 0 || step == config.steps);
            if (eval_now && !dataset.test.empty())
                *log << fmt17(eval_psnr(ck.scene, ck.medium, dataset.test, ropts));
            *log << ',' << ck.scene.gaussians.size() << '\n';
        }
        ck.step = step;
    }
    return ck;
}

}  // namespace medsplat

#include "medsplat/simulate.hpp"

#include "medsplat/io.hpp"
#include "medsplat/rng.hpp"

namespace medsplat {

PresetFamily preset_family_from_string(const std::string& s) {
    if (s == "fog") return PresetFamily::fog;
    if (s == "water") return PresetFamily::water;
    raise("UnknownMode", "preset family '" + s + "'");
}

PresetLevel preset_level_from_string(const std::string& s) {
    if (s == "easy") return PresetLevel::easy;
    if (s == "medium") return PresetLevel::medium;
    if (s == "hard") return PresetLevel::hard;
    raise("UnknownMode", "preset level '" + s + "'");
}

MediumPreset MediumPreset::make(PresetFamily family, PresetLevel level) {
    const double s = level == PresetLevel::easy ? 0.1 : (level == PresetLevel::medium ? 0.2 : 0.4);
    MediumPreset p;
    const char* lvl = level == PresetLevel::easy ? "easy"
                      : level == PresetLevel::medium ? "medium" : "hard";
    if (family == PresetFamily::fog) {
        p.name = std::string("fog_") + lvl;
        p.c_med = Vec3(0.7, 0.7, 0.7);
        p.sigma_att = s * Vec3(1.0, 1.0, 1.0);
        p.sigma_bs = p.sigma_att;
    } else {
        p.name = std::string("water_") + lvl;
        p.c_med = Vec3(0.1, 0.35, 0.45);
        p.sigma_att = s * Vec3(0.45, 0.15, 0.10);
        p.sigma_bs = s * Vec3(0.08, 0.12, 0.15);
    }
    return p;
}

MediumPreset MediumPreset::lerp(const MediumPreset& a, const MediumPreset& b, double t) {
    MediumPreset p;
    p.name = a.name + "~" + b.name;
    p.c_med = (1.0 - t) * a.c_med + t * b.c_med;
    p.sigma_att = (1.0 - t) * a.sigma_att + t * b.sigma_att;
    p.sigma_bs = (1.0 - t) * a.sigma_bs + t * b.sigma_bs;
    return p;
}

namespace {

// exp(-sigma z) with z <= 0 read as infinitely far; sigma == 0 stays 1.
double att_factor(double sigma, double z) {
    if (z > 0.0) return std::exp(-sigma * z);
    return sigma > 0.0 ? 0.0 : 1.0;
}

}  // namespace

Image degrade(const Image& clean, const Image& depth, const MediumPreset& preset) {
    if (clean.width != depth.width || clean.height != depth.height)
        raise("ShapeMismatch", "degrade: image vs depth extents");

    Image out = clean;
    for (int y = 0; y < clean.height; ++y)
        for (int x = 0; x < clean.width; ++x) {
            const double z = depth.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double direct = clean.at(x, y, c) * att_factor(preset.sigma_att[c], z);
                const double veil = preset.c_med[c] * (1.0 - att_factor(preset.sigma_bs[c], z));
                out.at(x, y, c) = std::min(1.0, std::max(0.0, direct + veil));
            }
        }
    return out;
}

Camera make_orbit_camera(int view_index, int n_views, int resolution) {
    const double theta = 2.0 * M_PI * view_index / std::max(1, n_views);
    const Vec3 eye(0.3 * std::cos(theta), 0.2 * std::sin(theta), 0.05 * std::sin(2.0 * theta));
    const Vec3 target(0.25 * std::cos(theta + 1.7), 0.2 * std::sin(2.3 * theta), 6.0);

    const Vec3 fwd = (target - eye).normalized();
    const Vec3 right = Vec3(0, 1, 0).cross(fwd).normalized();
    const Vec3 down = fwd.cross(right);

    Camera cam;
    cam.width = cam.height = resolution;
    cam.fx = cam.fy = 1.1 * resolution;
    cam.cx = cam.cy = 0.5 * resolution;
    cam.rotation.row(0) = right;
    cam.rotation.row(1) = down;
    cam.rotation.row(2) = fwd;
    cam.translation = -(cam.rotation * eye);
    return cam;
}

Scene make_toy_scene(uint64_t seed, int n_primitives) {
    Rng rng(seed);
    Scene scene;

    const int wall_side = std::max(8, static_cast<int>(std::lround(std::sqrt(0.75 * n_primitives))));
    const int n_mid = std::max(3, static_cast<int>(std::lround(0.15 * n_primitives)) / 14);
    const int n_near = std::max(2, static_cast<int>(std::lround(0.10 * n_primitives)) / 10);

    const Vec3 palette[5] = {Vec3(0.85, 0.35, 0.25), Vec3(0.25, 0.65, 0.35),
                             Vec3(0.30, 0.45, 0.85), Vec3(0.85, 0.75, 0.30),
                             Vec3(0.70, 0.40, 0.70)};

    // backdrop wall: fully covers the camera-ring frustum
    const double half = 4.6;
    const double spacing = 2.0 * half / (wall_side - 1);
    for (int iy = 0; iy < wall_side; ++iy)
        for (int ix = 0; ix < wall_side; ++ix) {
            const double x = -half + ix * spacing;
            const double y = -half + iy * spacing;
            GaussianPrimitive g;
            g.position = Vec3(x, y, 8.0 + 0.45 * std::sin(1.3 * x) * std::cos(1.1 * y));
            g.log_scale = Vec3::Constant(std::log(spacing * (0.85 + 0.15 * rng.uniform())));
            g.opacity_logit = rng.uniform(2.6, 3.4);  // sigmoid ~0.93..0.97
            Vec3 base = palette[(ix / 3 + iy / 3) % 5];
            base *= 0.65 + 0.3 * std::sin(0.9 * x + 0.4 * y) * std::sin(0.7 * y);
            base = base.cwiseMax(0.06).cwiseMin(0.9);
            const Vec3 dc = sh_dc_from_color(base);
            for (int c = 0; c < 3; ++c) g.color_sh(0, c) = dc[c];
            scene.gaussians.push_back(g);
        }

    auto add_cluster = [&](double zmin, double zmax, double cone_slope, double cone_margin,
                           int count, double smin, double smax, double offset) {
        const double z = rng.uniform(zmin, zmax);
        const double reach = std::max(0.15, cone_slope * z - cone_margin);
        const Vec3 center(rng.uniform(-reach, reach), rng.uniform(-reach, reach), z);
        const Vec3 base = (palette[rng.uniform_int(0, 4)] * rng.uniform(0.7, 1.05))
                              .cwiseMax(0.06)
                              .cwiseMin(0.9);
        for (int i = 0; i < count; ++i) {
            GaussianPrimitive g;
            g.position = center + Vec3(rng.uniform(-offset, offset), rng.uniform(-offset, offset),
                                       rng.uniform(-offset, offset) * 0.5);
            g.log_scale = Vec3(std::log(rng.uniform(smin, smax)), std::log(rng.uniform(smin, smax)),
                               std::log(rng.uniform(smin, smax)));
            const Vec3 axis = rng.unit_vector();
            g.rotation = Quat(Eigen::AngleAxisd(rng.uniform(0.0, M_PI), axis));
            g.opacity_logit = rng.uniform(2.0, 3.0);
            const Vec3 col =
                (base + Vec3(rng.normal(), rng.normal(), rng.normal()) * 0.04).cwiseMax(0.05).cwiseMin(0.92);
            const Vec3 dc = sh_dc_from_color(col);
            for (int c = 0; c < 3; ++c) g.color_sh(0, c) = dc[c];
            scene.gaussians.push_back(g);
        }
    };

    for (int k = 0; k < n_mid; ++k) add_cluster(4.0, 6.5, 0.40, 0.7, 14, 0.10, 0.26, 0.35);
    for (int k = 0; k < n_near; ++k) add_cluster(1.6, 3.2, 0.40, 0.45, 10, 0.05, 0.13, 0.17);

    Vec3 lo = scene.gaussians[0].position, hi = lo;
    for (const auto& g : scene.gaussians) {
        lo = lo.cwiseMin(g.position);
        hi = hi.cwiseMax(g.position);
    }
    // include the camera ring so medium lookups stay inside the box
    lo = lo.cwiseMin(Vec3(-0.5, -0.5, -0.2));
    hi = hi.cwiseMax(Vec3(0.5, 0.5, 0.2));
    scene.bounds = Bounds{lo, hi}.inflated(1.1);
    return scene;
}

void make_dataset(const SimulateConfig& config, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    if (config.n_views < 2) raise("IoFailure", "make_dataset: need at least 2 views");

    std::error_code ec;
    fs::create_directories(out_dir / "views", ec);
    if (ec) raise("IoFailure", "cannot create " + (out_dir / "views").string());

    const Scene scene = make_toy_scene(config.seed, config.n_primitives);
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

    RenderOptions ropts;
    ropts.threads = config.threads;

    io::DatasetManifest manifest;
    manifest.bounds = scene.bounds;
    manifest.points_path = "points.ply";
    manifest.preset = io::PresetRecord{config.preset.name, config.preset.c_med,
                                       config.preset.sigma_att, config.preset.sigma_bs};
    if (config.blend_to)
        manifest.preset_blend_to = io::PresetRecord{config.blend_to->name, config.blend_to->c_med,
                                                    config.blend_to->sigma_att,
                                                    config.blend_to->sigma_bs};

    std::vector<PointRecord> points;
    points.reserve(scene.gaussians.size());
    for (const auto& g : scene.gaussians) {
        Vec3 dc(g.color_sh(0, 0), g.color_sh(0, 1), g.color_sh(0, 2));
        points.push_back(PointRecord{g.position, sh_color_from_dc(dc)});
    }
    io::write_ply(out_dir / "points.ply", points);

    char name[64];
    for (int v = 0; v < config.n_views; ++v) {
        const Camera cam = make_orbit_camera(v, config.n_views, config.resolution);
        const RenderOutput clean = render_vanilla(scene, cam, Vec3::Zero(), ropts);

        MediumPreset preset = config.preset;
        if (config.blend_to && config.n_views > 1)
            preset = MediumPreset::lerp(config.preset, *config.blend_to,
                                        static_cast<double>(v) / (config.n_views - 1));
        const Image degraded = degrade(clean.color, clean.depth, preset);

        // monocular-style prior: positive affine of true depth plus noise
        const double k = rng.uniform(0.5, 2.0);
        const double b = rng.uniform(0.1, 1.0);
        Image pseudo = clean.depth;
        for (double& d : pseudo.data)
            d = (k * d + b) * (1.0 + config.pseudo_noise * rng.normal());

        std::snprintf(name, sizeof(name), "view_%03d", v);
        const std::string stem = std::string("views/") + name;

        io::ManifestView mv;
        mv.id = name;
        mv.split = (v % 2 == 0) ? "train" : "test";
        mv.camera_path = stem + "_camera.txt";
        mv.clean_path = stem + "_clean.f32";
        mv.degraded_path = stem + "_degraded.f32";
        mv.depth_path = stem + "_depth.pfm";
        mv.pseudo_depth_path = stem + "_pseudo.pfm";
        manifest.views.push_back(mv);

        io::write_camera(out_dir / mv.camera_path, cam);
        io::write_f32(out_dir / mv.clean_path, clean.color);
        io::write_png(out_dir / (stem + "_clean.png"), clean.color);
        io::write_f32(out_dir / mv.degraded_path, degraded);
        io::write_png(out_dir / (stem + "_degraded.png"), degraded);
        io::write_pfm(out_dir / mv.depth_path, clean.depth);
        io::write_pfm(out_dir / mv.pseudo_depth_path, pseudo);
    }

    io::write_manifest(out_dir / "dataset.json", manifest);
}

}  // namespace medsplat

#include "medsplat/parallel.hpp"
#include "render_internal.hpp"

namespace medsplat {

namespace {

using detail::SplatView;

// Per-primitive per-view accumulators gathered over pixels. The chains that
// depend only on per-view state (projection Jacobian, covariance, SH basis)
// are applied once per primitive afterwards.
struct SplatAccum {
    Vec2 g_mean2d = Vec2::Zero();
    Vec2 abs_g_mean2d = Vec2::Zero();
    // dL/d(cov2d_inv), symmetric: (0,0), (0,1)+(1,0), (1,1)
    double g_conic_xx = 0.0, g_conic_xy = 0.0, g_conic_yy = 0.0;
    double g_z = 0.0;
    double g_logit = 0.0;
    Vec3 g_color = Vec3::Zero();
    uint8_t visible = 0;
};

struct Fragment {
    int sj;          // index into the sorted splat list
    double alpha;    // value used by the forward pass (possibly clamped)
    double weight;   // unclamped exp(-q/2)
    bool clamped;
    double T;        // transmittance before this fragment
    Vec3 A;          // exp(-sigma_att * z)
    Vec3 B;          // exp(-sigma_bs * z)
};

struct BlockBuffers {
    std::vector<SplatAccum> splat;
    MediumGradients medium;
};

void backward_pixel(const std::vector<SplatView>& splats, int px, int py,
                    const MediumGrid& grid, const Vec3& cam_center, const Camera& camera,
                    const RenderOptions& opts, const RenderUpstream& up,
                    std::vector<Fragment>& frags, BlockBuffers& buf) {
    const double cx = px + 0.5, cy = py + 0.5;
    const Vec3 ray = camera.pixel_ray(cx, cy);
    MediumEvalContext mctx;
    const MediumSample med = medium_eval(grid, cam_center, ray, &mctx);

    // Rebuild the forward fragment chain.
    frags.clear();
    double T = 1.0;
    Vec3 B_prev = Vec3::Ones();
    Vec3 med_factor = Vec3::Zero();   // sum T_i (B_{i-1} - B_i)
    Vec3 satt_factor = Vec3::Zero();  // sum c_i alpha_i T_i z_i A_i
    Vec3 sbs_factor = Vec3::Zero();   // sum T_i (z_i B_i - z_{i-1} B_{i-1})
    double sum_zat = 0.0;
    double z_prev = 0.0;

    for (int j = 0; j < static_cast<int>(splats.size()); ++j) {
        const auto& s = splats[j];
        if (px < s.x0 || px > s.x1 || py < s.y0 || py > s.y1) continue;
        const double raw = detail::splat_alpha(s, cx, cy);
        if (raw < opts.alpha_min) continue;

        Fragment f;
        f.sj = j;
        f.weight = raw / s.opacity;
        f.clamped = raw > opts.alpha_max;
        f.alpha = f.clamped ? opts.alpha_max : raw;
        f.T = T;
        f.A = (-s.depth * med.sigma_att.array()).exp();
        f.B = (-s.depth * med.sigma_bs.array()).exp();

        med_factor += T * (B_prev - f.B);
        satt_factor += (f.alpha * T * s.depth) * s.color.cwiseProduct(f.A);
        sbs_factor += T * (s.depth * f.B - z_prev * B_prev);
        sum_zat += s.depth * f.alpha * T;

        frags.push_back(f);
        B_prev = f.B;
        z_prev = s.depth;
        T *= (1.0 - f.alpha);
        if (opts.early_stop && T < opts.early_stop_T) break;
    }
    const double tau = T;
    const Vec3 B_last = B_prev;
    const double z_last = z_prev;

    const bool has_color = !up.d_color.empty();
    const bool has_depth = !up.d_depth.empty();
    const bool has_trans = !up.d_transmittance.empty();
    const bool has_restored = !up.d_restored.empty();

    const Vec3 uc = has_color ? up.d_color.rgb(px, py) : Vec3::Zero();
    const Vec3 ur = has_restored ? up.d_restored.rgb(px, py) : Vec3::Zero();
    const double ud = has_depth ? up.d_depth.at(px, py) : 0.0;
    const double ut = has_trans ? up.d_transmittance.at(px, py) : 0.0;

    const bool depth_live = (1.0 - tau) >= kDepthGuard;
    const double uSz = depth_live ? ud / (1.0 - tau) : 0.0;
    const double utau = ut + (depth_live ? ud * sum_zat / ((1.0 - tau) * (1.0 - tau)) : 0.0);

    // ---- medium parameter partials at this pixel ----
    if (has_color) {
        const Vec3 d_cmed = uc.cwiseProduct(med_factor + tau * B_last);
        const Vec3 d_satt = -uc.cwiseProduct(satt_factor);
        const Vec3 d_sbs =
            uc.cwiseProduct(med.c_med.cwiseProduct(sbs_factor - tau * z_last * B_last));

        for (int f = 0; f < 3; ++f) {
            Vec3 scal;
            for (int ch = 0; ch < 3; ++ch) {
                double act_prime, upv;
                if (f == 0) {
                    act_prime = med.c_med[ch] * (1.0 - med.c_med[ch]);
                    upv = d_cmed[ch];
                } else if (f == 1) {
                    act_prime = sigmoid(mctx.raw_sigma_att[ch]);
                    upv = d_satt[ch];
                } else {
                    act_prime = sigmoid(mctx.raw_sigma_bs[ch]);
                    upv = d_sbs[ch];
                }
                scal[ch] = act_prime * upv;
            }
            auto& gfield = buf.medium.field(static_cast<MediumField>(f));
            for (int corner = 0; corner < 8; ++corner) {
                const double w = mctx.weights[corner];
                if (w == 0.0) continue;
                for (int ch = 0; ch < 3; ++ch)
                    gfield[corner].col(ch).noalias() += (w * scal[ch]) * mctx.basis;
            }
        }
    }

    if (frags.empty()) return;

    // ---- fragment traversal, back to front, with suffix sums over j > i ----
    Vec3 Sobj = Vec3::Zero();    // sum c alpha T A
    Vec3 Srest = Vec3::Zero();   // sum c alpha T
    Vec3 Smed = Vec3::Zero();    // sum c_med T (B_prev - B)
    double Szz = 0.0;            // sum z alpha T
    const Vec3 med_tail = med.c_med.cwiseProduct(tau * B_last);

    for (int i = static_cast<int>(frags.size()) - 1; i >= 0; --i) {
        const Fragment& f = frags[i];
        const SplatView& s = splats[f.sj];
        SplatAccum& acc = buf.splat[f.sj];
        acc.visible = 1;

        const double one_minus = 1.0 - f.alpha;
        const Vec3 B_before = i > 0 ? frags[i - 1].B : Vec3::Ones();

        // d/d alpha_i
        double g_alpha = 0.0;
        g_alpha += uc.dot(s.color.cwiseProduct(f.A) * f.T - (Sobj + Smed + med_tail) / one_minus);
        g_alpha += ur.dot(s.color * f.T - Srest / one_minus);
        g_alpha += uSz * (s.depth * f.T - Szz / one_minus);
        g_alpha += utau * (-tau / one_minus);

        // d/d color_i
        const Vec3 g_color = uc.cwiseProduct(f.A) * (f.alpha * f.T) + ur * (f.alpha * f.T);

        // d/d z_i: attenuation, backscatter segment boundaries, blended depth
        double g_z = uc.dot(s.color.cwiseProduct(f.A).cwiseProduct(-med.sigma_att)) *
                     (f.alpha * f.T);
        g_z += uc.dot(med.c_med.cwiseProduct(med.sigma_bs).cwiseProduct(f.B)) * (f.alpha * f.T);
        g_z += uSz * f.alpha * f.T;

        acc.g_color += g_color;
        acc.g_z += g_z;

        if (!f.clamped) {
            const double sig = s.opacity;
            acc.g_logit += g_alpha * f.weight * sig * (1.0 - sig);
            const double gq = g_alpha * (-0.5) * f.alpha;
            const Vec2 d(cx - s.mean2d.x(), cy - s.mean2d.y());
            const Vec2 conic_d = s.cov2d_inv * d;
            const Vec2 gm = -2.0 * gq * conic_d;
            acc.g_mean2d += gm;
            acc.abs_g_mean2d += gm.cwiseAbs();
            acc.g_conic_xx += gq * d.x() * d.x();
            acc.g_conic_xy += gq * d.x() * d.y();
            acc.g_conic_yy += gq * d.y() * d.y();
        } else {
            // alpha pinned at the clamp: no gradient through the Gaussian
            acc.abs_g_mean2d += Vec2::Zero();
        }

        // extend suffix sums with fragment i
        Sobj += (f.alpha * f.T) * s.color.cwiseProduct(f.A);
        Srest += (f.alpha * f.T) * s.color;
        Smed += f.T * med.c_med.cwiseProduct(B_before - f.B);
        Szz += s.depth * f.alpha * f.T;
    }
}

// Chains that depend only on per-view state, applied once per primitive.
void finalize_splat(const SplatView& s, const SplatAccum& acc, const Scene& scene,
                    const Camera& camera, Gradients& out) {
    const int idx = s.index;
    const auto& g = scene.gaussians[idx];
    out.visible[idx] = 1;
    out.abs_grad_mean2d[idx] += acc.abs_g_mean2d;
    out.d_opacity_logit[idx] += acc.g_logit;

    // color -> SH coefficients and, through the view direction, the position
    ShVec u = ShVec::Zero();
    for (int ch = 0; ch < 3; ++ch) {
        if (s.color_pre_clamp[ch] <= 0.0) continue;  // clamped channel
        out.d_color_sh[idx].col(ch) += acc.g_color[ch] * s.basis;
        u += acc.g_color[ch] * g.color_sh.col(ch);
    }
    const auto Jy = sh_basis_jacobian(s.view_dir);
    const Vec3 d_dir = Jy.transpose() * u;
    if (s.view_dist > 1e-12) {
        const Mat3 proj = (Mat3::Identity() - s.view_dir * s.view_dir.transpose()) / s.view_dist;
        out.d_position[idx] += proj * d_dir;
    }

    // conic -> cov2d
    Mat2 g_conic;
    g_conic << acc.g_conic_xx, acc.g_conic_xy, acc.g_conic_xy, acc.g_conic_yy;
    const Mat2 g_cov2d = -s.cov2d_inv * g_conic * s.cov2d_inv;

    const double x = s.cam_pos.x(), y = s.cam_pos.y(), z = s.cam_pos.z();
    const double fx = camera.fx, fy = camera.fy;
    Eigen::Matrix<double, 2, 3> J;
    J << fx / z, 0.0, -fx * x / (z * z),
         0.0, fy / z, -fy * y / (z * z);

    const Mat3 sigma3 = covariance_from_params(g.rotation, g.log_scale);
    const Mat3 sigma_cam = camera.rotation * sigma3 * camera.rotation.transpose();

    const Mat3 g_sigma_cam = J.transpose() * g_cov2d * J;
    const Eigen::Matrix<double, 2, 3> g_J = 2.0 * g_cov2d * J * sigma_cam;

    Vec3 g_cam = Vec3::Zero();
    g_cam.x() += g_J(0, 2) * (-fx / (z * z));
    g_cam.y() += g_J(1, 2) * (-fy / (z * z));
    g_cam.z() += g_J(0, 0) * (-fx / (z * z)) + g_J(1, 1) * (-fy / (z * z)) +
                 g_J(0, 2) * (2.0 * fx * x / (z * z * z)) +
                 g_J(1, 2) * (2.0 * fy * y / (z * z * z));

    // mean2d and depth paths share the camera-space position
    g_cam += J.transpose() * acc.g_mean2d;
    g_cam.z() += acc.g_z;
    out.d_position[idx] += camera.rotation.transpose() * g_cam;

    // covariance -> rotation and log scales
    const Mat3 g_sigma3 = camera.rotation.transpose() * g_sigma_cam * camera.rotation;
    const Quat qn = g.rotation.normalized();
    const Mat3 R = qn.toRotationMatrix();
    const Vec3 d2 = (2.0 * g.log_scale).array().exp();

    const Mat3 M = R.transpose() * g_sigma3 * R;
    for (int a = 0; a < 3; ++a) out.d_log_scale[idx][a] += M(a, a) * 2.0 * d2[a];

    const Mat3 g_R = 2.0 * g_sigma3 * R * d2.asDiagonal();
    const double qw = qn.w(), qx = qn.x(), qy = qn.y(), qz = qn.z();
    Mat3 dR[4];
    dR[0] << 0, -qz, qy, qz, 0, -qx, -qy, qx, 0;                       // d/dw
    dR[1] << 0, qy, qz, qy, -2 * qx, -qw, qz, qw, -2 * qx;             // d/dx
    dR[2] << -2 * qy, qx, qw, qx, 0, qz, -qw, qz, -2 * qy;             // d/dy
    dR[3] << -2 * qz, -qw, qx, qw, -2 * qz, qy, qx, qy, 0;             // d/dz
    Vec4 g_q;
    for (int a = 0; a < 4; ++a) g_q[a] = 2.0 * (g_R.array() * dR[a].array()).sum();

    // remove the component along q: the forward path renormalizes
    const Vec4 qv(qw, qx, qy, qz);
    const double qnorm = g.rotation.norm();
    out.d_rotation[idx] += (g_q - qv * qv.dot(g_q)) / qnorm;
}

}  // namespace

Gradients render_backward(const Scene& scene, const MediumGrid& medium, const Camera& camera,
                          const RenderOptions& opts, const RenderUpstream& upstream) {
    const auto splats = detail::project_scene(scene, camera, opts);
    const int H = camera.height, W = camera.width;
    const int n_blocks = detail::row_blocks(H);
    const Vec3 cam_center = camera.center();

    Gradients out;
    out.resize(scene.gaussians.size());

    std::vector<BlockBuffers> blocks(n_blocks);
    parallel_blocks(n_blocks, opts.threads, [&](int block) {
        auto& buf = blocks[block];
        buf.splat.assign(splats.size(), SplatAccum{});
        buf.medium.set_zero();
        std::vector<Fragment> frags;
        int r0, r1;
        detail::block_rows(block, H, &r0, &r1);
        for (int py = r0; py < r1; ++py)
            for (int px = 0; px < W; ++px)
                backward_pixel(splats, px, py, medium, cam_center, camera, opts, upstream,
                               frags, buf);
    });

    // fixed-order reduction keeps results identical for any worker count
    std::vector<SplatAccum> total(splats.size());
    for (const auto& buf : blocks) {
        for (size_t j = 0; j < splats.size(); ++j) {
            auto& t = total[j];
            const auto& a = buf.splat[j];
            t.g_mean2d += a.g_mean2d;
            t.abs_g_mean2d += a.abs_g_mean2d;
            t.g_conic_xx += a.g_conic_xx;
            t.g_conic_xy += a.g_conic_xy;
            t.g_conic_yy += a.g_conic_yy;
            t.g_z += a.g_z;
            t.g_logit += a.g_logit;
            t.g_color += a.g_color;
            t.visible |= a.visible;
        }
        for (int f = 0; f < 3; ++f) {
            auto& dst = out.medium.field(static_cast<MediumField>(f));
            const auto& src = const_cast<BlockBuffers&>(buf).medium.field(static_cast<MediumField>(f));
            for (int corner = 0; corner < 8; ++corner) dst[corner] += src[corner];
        }
    }

    parallel_blocks(static_cast<int>(splats.size()), opts.threads, [&](int j) {
        if (!total[j].visible) {
            out.visible[splats[j].index] = 1;  // projected but no surviving fragment
            return;
        }
        finalize_splat(splats[j], total[j], scene, camera, out);
    });
    return out;
}

}  // namespace medsplat

#include "medsplat/metrics.hpp"

#include "ssim_engine.hpp"

#include <limits>

namespace medsplat {

double psnr(const Image& a, const Image& b) {
    require_same_shape(a, b, "psnr");
    const Image ca = clamp01(a), cb = clamp01(b);
    double mse = 0.0;
    for (size_t i = 0; i < ca.size(); ++i) {
        const double d = ca.data[i] - cb.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(ca.size());
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
    return detail::ms_ssim_value(clamp01(a), clamp01(b), 1, nullptr);
}

double ms_ssim(const Image& a, const Image& b) {
    const int scales = detail::ms_ssim_scales(a.width, a.height);
    return detail::ms_ssim_value(clamp01(a), clamp01(b), scales, nullptr);
}

Image exposure_align(const Image& restored, const Image& gt) {
    require_same_shape(restored, gt, "exposure_align");
    const double mr = restored.mean();
    if (mr <= 1e-12) raise("ZeroMeanRestored", "restored image mean is zero");
    const double scale = gt.mean() / mr;
    Image out = restored;
    for (double& v : out.data) v = std::min(1.0, std::max(0.0, v * scale));
    return out;
}

}  // namespace medsplat

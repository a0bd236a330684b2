#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace medsplat {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Typed error carrying a stable machine-readable kind, surfaced verbatim by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void raise(const std::string& kind, const std::string& message) {
    throw Error(kind, message);
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// d softplus / dx
inline double softplus_prime(double x) { return sigmoid(x); }

// Axis-aligned box used for scene extents and medium-grid normalization.
struct Bounds {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();

    Vec3 center() const { return 0.5 * (min + max); }
    Vec3 extent() const { return max - min; }
    double max_extent() const { return extent().maxCoeff(); }

    Bounds inflated(double factor) const {
        const Vec3 c = center();
        const Vec3 h = 0.5 * factor * extent();
        return Bounds{c - h, c + h};
    }

    Vec3 clamp_point(const Vec3& p) const { return p.cwiseMax(min).cwiseMin(max); }

    bool valid() const { return (min.array() < max.array()).all(); }
};

// Dense row-major image with interleaved channels. Everything internal is double;
// quantization happens only at the PNG boundary.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<size_t>(w) * h * c, fill) {}

    bool empty() const { return data.empty(); }
    size_t size() const { return data.size(); }
    size_t pixels() const { return static_cast<size_t>(width) * height; }

    double& at(int x, int y, int c = 0) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    Vec3 rgb(int x, int y) const {
        const size_t i = (static_cast<size_t>(y) * width + x) * channels;
        return Vec3(data[i], data[i + 1], data[i + 2]);
    }
    void set_rgb(int x, int y, const Vec3& v) {
        const size_t i = (static_cast<size_t>(y) * width + x) * channels;
        data[i] = v.x();
        data[i + 1] = v.y();
        data[i + 2] = v.z();
    }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    double mean() const {
        if (data.empty()) return 0.0;
        double s = 0.0;
        for (double v : data) s += v;
        return s / static_cast<double>(data.size());
    }
};

inline void require_same_shape(const Image& a, const Image& b, const char* where) {
    if (!a.same_shape(b))
        raise("ShapeMismatch", std::string(where) + ": " + std::to_string(a.width) + "x" +
                                   std::to_string(a.height) + "x" + std::to_string(a.channels) +
                                   " vs " + std::to_string(b.width) + "x" +
                                   std::to_string(b.height) + "x" + std::to_string(b.channels));
}

inline Image clamp01(const Image& img) {
    Image out = img;
    for (double& v : out.data) v = std::min(1.0, std::max(0.0, v));
    return out;
}

}  // namespace medsplat

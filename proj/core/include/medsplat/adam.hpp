#pragma once

#include "medsplat/common.hpp"

#include <span>

namespace medsplat {

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-15;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    void resize(size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
    }
};

// Standard bias-corrected update; state is sized lazily on first use.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, const AdamParams& hyper = {});

}  // namespace medsplat

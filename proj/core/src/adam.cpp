#include "medsplat/adam.hpp"

namespace medsplat {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, const AdamParams& hyper) {
    if (params.size() != grads.size())
        raise("ShapeMismatch", "adam_step: " + std::to_string(params.size()) + " params vs " +
                                   std::to_string(grads.size()) + " grads");
    if (state.m.size() != params.size()) state.resize(params.size());

    state.step += 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));

    for (size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * g;
        state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + hyper.eps);
    }
}

}  // namespace medsplat

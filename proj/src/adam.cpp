#include "n2c/adam.hpp"

#include <cmath>

namespace n2c::nn {

void adam_step(AdamState& state, Vec& params, const Vec& grads) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size())
        throw ShapeMismatch("adam_step: parameter/gradient/state sizes differ");

    state.t += 1;
    const auto t = static_cast<double>(state.t);
    const double lr_t = state.lr / (1.0 + state.decay * (t - 1.0));
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);

    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= lr_t * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

double clip_global_norm(Vec& grads, double max_norm) {
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (double& g : grads) g *= scale;
    }
    return norm;
}

}  // namespace n2c::nn

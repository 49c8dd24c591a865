#pragma once

#include "n2c/matrix.hpp"

namespace n2c::nn {

// Bias-corrected Adam over a flat parameter vector with the Keras-style
// per-update learning-rate decay lr_t = lr / (1 + decay * (t - 1)).
struct AdamState {
    Vec m;
    Vec v;
    long long t = 0;
    double lr = 0.008;
    double decay = 0.0001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t n, double lr_, double decay_)
        : m(n, 0.0), v(n, 0.0), lr(lr_), decay(decay_) {}
};

void adam_step(AdamState& state, Vec& params, const Vec& grads);

// Scales `grads` in place so its L2 norm does not exceed `max_norm`;
// disabled when max_norm <= 0. Returns the pre-clip norm.
double clip_global_norm(Vec& grads, double max_norm);

}  // namespace n2c::nn

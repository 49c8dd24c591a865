#pragma once

#include <vector>

#include "n2c/matrix.hpp"

namespace n2c::nn {

// Temporal 1-D convolution (cross-correlation) with "same" zero padding.
// Weights are indexed [out_channel][in_channel][tap]; the kernel width must
// be odd so the padding is symmetric.
struct Conv1dParams {
    int out_channels = 0;
    int in_channels = 0;
    int kernel = 1;
    Vec weights;  // out_channels * in_channels * kernel
    Vec bias;     // out_channels

    Conv1dParams() = default;
    Conv1dParams(int out_ch, int in_ch, int k);

    double& w(int oc, int ic, int tap) {
        return weights[(static_cast<std::size_t>(oc) * in_channels + ic) * kernel + tap];
    }
    double w(int oc, int ic, int tap) const {
        return weights[(static_cast<std::size_t>(oc) * in_channels + ic) * kernel + tap];
    }

    void check_shapes() const;
};

// X is a length-n sequence of in_channel vectors; output is length n of
// out_channel vectors: out[t][k] = b[k] + sum_c sum_j w[k][c][j] * x[t+j-K/2][c]
std::vector<Vec> conv1d_forward(const Conv1dParams& p, const std::vector<Vec>& xs);

// Accumulates parameter gradients into `grads`, returns dX.
std::vector<Vec> conv1d_backward(const Conv1dParams& p, const std::vector<Vec>& xs,
                                 const std::vector<Vec>& dy, Conv1dParams& grads);

}  // namespace n2c::nn

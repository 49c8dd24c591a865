#include "n2c/conv1d.hpp"

namespace n2c::nn {

Conv1dParams::Conv1dParams(int out_ch, int in_ch, int k)
    : out_channels(out_ch),
      in_channels(in_ch),
      kernel(k),
      weights(static_cast<std::size_t>(out_ch) * in_ch * k, 0.0),
      bias(static_cast<std::size_t>(out_ch), 0.0) {
    check_shapes();
}

void Conv1dParams::check_shapes() const {
    if (out_channels < 1 || in_channels < 1) throw ShapeMismatch("Conv1dParams: channels must be >= 1");
    if (kernel < 1 || kernel % 2 == 0)
        throw ShapeMismatch("Conv1dParams: kernel width must be odd for same padding");
    if (weights.size() != static_cast<std::size_t>(out_channels) * in_channels * kernel ||
        bias.size() != static_cast<std::size_t>(out_channels))
        throw ShapeMismatch("Conv1dParams: weight/bias sizes inconsistent");
}

std::vector<Vec> conv1d_forward(const Conv1dParams& p, const std::vector<Vec>& xs) {
    p.check_shapes();
    const int n = static_cast<int>(xs.size());
    const int half = p.kernel / 2;
    for (const auto& x : xs)
        if (x.size() != static_cast<std::size_t>(p.in_channels))
            throw ShapeMismatch("conv1d_forward: input channel mismatch");

    std::vector<Vec> out(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(p.out_channels), 0.0));
    for (int t = 0; t < n; ++t) {
        for (int oc = 0; oc < p.out_channels; ++oc) {
            double acc = p.bias[static_cast<std::size_t>(oc)];
            for (int j = 0; j < p.kernel; ++j) {
                const int src = t + j - half;
                if (src < 0 || src >= n) continue;  // zero padding
                const Vec& x = xs[static_cast<std::size_t>(src)];
                for (int ic = 0; ic < p.in_channels; ++ic) acc += p.w(oc, ic, j) * x[static_cast<std::size_t>(ic)];
            }
            out[static_cast<std::size_t>(t)][static_cast<std::size_t>(oc)] = acc;
        }
    }
    return out;
}

std::vector<Vec> conv1d_backward(const Conv1dParams& p, const std::vector<Vec>& xs,
                                 const std::vector<Vec>& dy, Conv1dParams& grads) {
    p.check_shapes();
    grads.check_shapes();
    const int n = static_cast<int>(xs.size());
    const int half = p.kernel / 2;
    if (dy.size() != xs.size()) throw ShapeMismatch("conv1d_backward: sequence length mismatch");

    std::vector<Vec> dx(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(p.in_channels), 0.0));
    for (int t = 0; t < n; ++t) {
        const Vec& dyt = dy[static_cast<std::size_t>(t)];
        for (int oc = 0; oc < p.out_channels; ++oc) {
            const double d = dyt[static_cast<std::size_t>(oc)];
            if (d == 0.0) continue;
            grads.bias[static_cast<std::size_t>(oc)] += d;
            for (int j = 0; j < p.kernel; ++j) {
                const int src = t + j - half;
                if (src < 0 || src >= n) continue;
                const Vec& x = xs[static_cast<std::size_t>(src)];
                Vec& dxs = dx[static_cast<std::size_t>(src)];
                for (int ic = 0; ic < p.in_channels; ++ic) {
                    grads.w(oc, ic, j) += d * x[static_cast<std::size_t>(ic)];
                    dxs[static_cast<std::size_t>(ic)] += d * p.w(oc, ic, j);
                }
            }
        }
    }
    return dx;
}

}  // namespace n2c::nn

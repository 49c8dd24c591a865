#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "n2c/conv1d.hpp"
#include "n2c/lstm.hpp"
#include "n2c/matrix.hpp"
#include "n2c/rng.hpp"

namespace n2c::nn {

enum class ArchVariant { kLstm5, kConvLstm, kConv1d };

struct ConvLayerSpec {
    int channels = 0;
    int kernel = 3;
};

// Topology of one controller network. All variants consume an n x input_dim
// sequence and emit an n x output_dim sequence through a per-timestep dense
// head with tanh activation, so outputs always lie in [-1, 1].
//
// Dropout placement: none inside the stacked-LSTM variant; after each conv
// layer in the conv+LSTM variant; after every second conv layer in the
// all-conv variant.
struct ArchitectureSpec {
    ArchVariant variant = ArchVariant::kLstm5;
    std::vector<int> lstm_sizes;
    std::vector<ConvLayerSpec> conv_layers;
    int input_dim = 2;
    int output_dim = 3;
    double dropout_rate = 0.2;

    void validate() const;
    std::string variant_name() const;

    // Full-size networks as published.
    static ArchitectureSpec paper_lstm5() { return with_lstm({300, 250, 100, 50, 20}); }
    static ArchitectureSpec paper_conv_lstm() {
        return with_conv_lstm({{64, 3}, {64, 3}}, {100, 50, 25, 10});
    }
    static ArchitectureSpec paper_conv1d() {
        return with_conv({{64, 3}, {64, 3}, {48, 3}, {32, 3}, {16, 3}});
    }

    // CPU-friendly profile used by the workbench experiments.
    static ArchitectureSpec desk_lstm5() { return with_lstm({64, 48, 32, 16, 8}); }
    static ArchitectureSpec desk_conv_lstm() {
        return with_conv_lstm({{32, 3}, {32, 3}}, {48, 32, 16, 8});
    }
    static ArchitectureSpec desk_conv1d() {
        return with_conv({{32, 3}, {32, 3}, {24, 3}, {16, 3}, {8, 3}});
    }

    static ArchitectureSpec with_lstm(std::vector<int> sizes);
    static ArchitectureSpec with_conv_lstm(std::vector<ConvLayerSpec> convs, std::vector<int> sizes);
    static ArchitectureSpec with_conv(std::vector<ConvLayerSpec> convs);
};

// Weight container matching an ArchitectureSpec. Flat serialization order:
// conv layers in network order (weights, then bias); then per LSTM layer the
// gates in (input, forget, output, cell) order, each as W_x, W_h, b; then
// the dense head W, then its bias.
struct NetworkParams {
    std::vector<Conv1dParams> conv;
    std::vector<LstmLayerParams> lstm;
    Matrix head_w;
    Vec head_b;

    static NetworkParams zeros(const ArchitectureSpec& spec);
    static NetworkParams glorot_init(const ArchitectureSpec& spec, Rng& rng);

    std::size_t param_count() const;
    void flatten(Vec& out) const;
    void unflatten(const Vec& flat);
};

enum class RunMode { kTrain, kEval };

struct NetworkCache {
    RunMode mode = RunMode::kEval;
    std::vector<std::vector<Vec>> conv_inputs;
    std::vector<std::vector<Vec>> conv_pre;      // pre-ReLU activations
    std::vector<std::vector<Vec>> dropout_masks; // one entry per dropout application
    std::vector<LstmLayerCache> lstm;
    std::vector<Vec> head_in;
    std::vector<Vec> outputs;
};

// Uniform on +/- sqrt(6 / (fan_in + fan_out)) with fan_in = cols,
// fan_out = rows.
Matrix glorot_uniform(int rows, int cols, Rng& rng);

// Inverted dropout: train mode zeroes entries with probability `rate` and
// scales survivors by 1/(1-rate); eval mode is the identity.
std::vector<Vec> dropout(const std::vector<Vec>& xs, double rate, RunMode mode, Rng& rng);

std::vector<Vec> network_forward(const ArchitectureSpec& spec, const NetworkParams& params,
                                 const std::vector<Vec>& xs, RunMode mode, Rng& rng,
                                 NetworkCache& cache);

NetworkParams network_backward(const ArchitectureSpec& spec, const NetworkParams& params,
                               const NetworkCache& cache, const std::vector<Vec>& dy);

}  // namespace n2c::nn

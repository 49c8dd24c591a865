#pragma once

#include <vector>

#include "n2c/matrix.hpp"

namespace n2c::nn {

// One LSTM layer's parameters: per gate g in {input, forget, output, cell}
// an input matrix W_x (hidden x input), a recurrent matrix W_h
// (hidden x hidden), and a bias b (hidden).
struct LstmGateParams {
    Matrix w_x;
    Matrix w_h;
    Vec b;
};

struct LstmLayerParams {
    int input_dim = 0;
    int hidden_dim = 0;
    LstmGateParams input_gate;
    LstmGateParams forget_gate;
    LstmGateParams output_gate;
    LstmGateParams cell_gate;

    LstmLayerParams() = default;
    LstmLayerParams(int input, int hidden);

    void check_shapes() const;
};

// Everything the backward pass needs from one forward timestep.
struct LstmCellCache {
    Vec x;
    Vec h_prev;
    Vec c_prev;
    Vec i, f, o, g;  // gate activations; g = tanh cell candidate
    Vec c, h;
};

// Gate equations:
//   i = sigmoid(W_xi x + W_hi h_prev + b_i)
//   f = sigmoid(W_xf x + W_hf h_prev + b_f)
//   o = sigmoid(W_xo x + W_ho h_prev + b_o)
//   g = tanh   (W_xc x + W_hc h_prev + b_c)
//   c = f . c_prev + i . g
//   h = o . tanh(c)
LstmCellCache lstm_cell_forward(const LstmLayerParams& p, const Vec& x, const Vec& h_prev,
                                const Vec& c_prev);

// Exact analytic gradients of the cell equations. Accumulates parameter
// gradients into `grads`; writes dx, dh_prev, dc_prev for the chain.
void lstm_cell_backward(const LstmLayerParams& p, const LstmCellCache& cache, const Vec& dh,
                        const Vec& dc, LstmLayerParams& grads, Vec& dx, Vec& dh_prev, Vec& dc_prev);

// Whole-sequence helpers (h_0 = c_0 = 0).
struct LstmLayerCache {
    std::vector<LstmCellCache> steps;
};

std::vector<Vec> lstm_layer_forward(const LstmLayerParams& p, const std::vector<Vec>& xs,
                                    LstmLayerCache& cache);

std::vector<Vec> lstm_layer_backward(const LstmLayerParams& p, const LstmLayerCache& cache,
                                     const std::vector<Vec>& dh_seq, LstmLayerParams& grads);

}  // namespace n2c::nn

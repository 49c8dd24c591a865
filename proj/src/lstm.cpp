#include "n2c/lstm.hpp"

#include <cassert>
#include <cmath>

namespace n2c::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void gate_preact(const LstmGateParams& g, const Vec& x, const Vec& h_prev, Vec& out) {
    out = g.b;
    matvec_acc(g.w_x, x, out);
    matvec_acc(g.w_h, h_prev, out);
}

}  // namespace

LstmLayerParams::LstmLayerParams(int input, int hidden) : input_dim(input), hidden_dim(hidden) {
    for (LstmGateParams* g : {&input_gate, &forget_gate, &output_gate, &cell_gate}) {
        g->w_x = Matrix(hidden, input);
        g->w_h = Matrix(hidden, hidden);
        g->b.assign(static_cast<std::size_t>(hidden), 0.0);
    }
}

void LstmLayerParams::check_shapes() const {
    for (const LstmGateParams* g : {&input_gate, &forget_gate, &output_gate, &cell_gate}) {
        if (g->w_x.rows != hidden_dim || g->w_x.cols != input_dim || g->w_h.rows != hidden_dim ||
            g->w_h.cols != hidden_dim || g->b.size() != static_cast<std::size_t>(hidden_dim))
            throw ShapeMismatch("LstmLayerParams: inconsistent gate shapes");
    }
}

LstmCellCache lstm_cell_forward(const LstmLayerParams& p, const Vec& x, const Vec& h_prev,
                                const Vec& c_prev) {
    p.check_shapes();
    const auto hidden = static_cast<std::size_t>(p.hidden_dim);
    if (x.size() != static_cast<std::size_t>(p.input_dim) || h_prev.size() != hidden ||
        c_prev.size() != hidden)
        throw ShapeMismatch("lstm_cell_forward: input shapes do not match layer");

    LstmCellCache cache;
    cache.x = x;
    cache.h_prev = h_prev;
    cache.c_prev = c_prev;

    gate_preact(p.input_gate, x, h_prev, cache.i);
    gate_preact(p.forget_gate, x, h_prev, cache.f);
    gate_preact(p.output_gate, x, h_prev, cache.o);
    gate_preact(p.cell_gate, x, h_prev, cache.g);
    for (std::size_t j = 0; j < hidden; ++j) {
        cache.i[j] = sigmoid(cache.i[j]);
        cache.f[j] = sigmoid(cache.f[j]);
        cache.o[j] = sigmoid(cache.o[j]);
        cache.g[j] = std::tanh(cache.g[j]);
        assert(cache.i[j] > 0.0 && cache.i[j] < 1.0);
        assert(cache.f[j] > 0.0 && cache.f[j] < 1.0);
        assert(cache.o[j] > 0.0 && cache.o[j] < 1.0);
        assert(cache.g[j] > -1.0 && cache.g[j] < 1.0);
    }

    cache.c.resize(hidden);
    cache.h.resize(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        cache.c[j] = cache.f[j] * c_prev[j] + cache.i[j] * cache.g[j];
        cache.h[j] = cache.o[j] * std::tanh(cache.c[j]);
    }
    return cache;
}

void lstm_cell_backward(const LstmLayerParams& p, const LstmCellCache& cache, const Vec& dh,
                        const Vec& dc_in, LstmLayerParams& grads, Vec& dx, Vec& dh_prev,
                        Vec& dc_prev) {
    const auto hidden = static_cast<std::size_t>(p.hidden_dim);
    if (dh.size() != hidden || dc_in.size() != hidden)
        throw ShapeMismatch("lstm_cell_backward: upstream gradient shape mismatch");

    Vec da_i(hidden), da_f(hidden), da_o(hidden), da_g(hidden);
    dc_prev.assign(hidden, 0.0);
    for (std::size_t j = 0; j < hidden; ++j) {
        const double tanh_c = std::tanh(cache.c[j]);
        const double do_j = dh[j] * tanh_c;
        const double dc = dc_in[j] + dh[j] * cache.o[j] * (1.0 - tanh_c * tanh_c);
        const double di = dc * cache.g[j];
        const double df = dc * cache.c_prev[j];
        const double dg = dc * cache.i[j];
        dc_prev[j] = dc * cache.f[j];
        da_i[j] = di * cache.i[j] * (1.0 - cache.i[j]);
        da_f[j] = df * cache.f[j] * (1.0 - cache.f[j]);
        da_o[j] = do_j * cache.o[j] * (1.0 - cache.o[j]);
        da_g[j] = dg * (1.0 - cache.g[j] * cache.g[j]);
    }

    dx.assign(cache.x.size(), 0.0);
    dh_prev.assign(hidden, 0.0);
    struct GatePair {
        const Vec* da;
        const LstmGateParams* params;
        LstmGateParams* grad;
    };
    const GatePair gates[4] = {{&da_i, &p.input_gate, &grads.input_gate},
                               {&da_f, &p.forget_gate, &grads.forget_gate},
                               {&da_o, &p.output_gate, &grads.output_gate},
                               {&da_g, &p.cell_gate, &grads.cell_gate}};
    for (const auto& gate : gates) {
        outer_acc(gate.grad->w_x, *gate.da, cache.x);
        outer_acc(gate.grad->w_h, *gate.da, cache.h_prev);
        for (std::size_t j = 0; j < hidden; ++j) gate.grad->b[j] += (*gate.da)[j];
        matvec_t_acc(gate.params->w_x, *gate.da, dx);
        matvec_t_acc(gate.params->w_h, *gate.da, dh_prev);
    }
}

std::vector<Vec> lstm_layer_forward(const LstmLayerParams& p, const std::vector<Vec>& xs,
                                    LstmLayerCache& cache) {
    const auto hidden = static_cast<std::size_t>(p.hidden_dim);
    Vec h(hidden, 0.0), c(hidden, 0.0);
    cache.steps.clear();
    cache.steps.reserve(xs.size());
    std::vector<Vec> hs;
    hs.reserve(xs.size());
    for (const Vec& x : xs) {
        cache.steps.push_back(lstm_cell_forward(p, x, h, c));
        h = cache.steps.back().h;
        c = cache.steps.back().c;
        hs.push_back(h);
    }
    return hs;
}

std::vector<Vec> lstm_layer_backward(const LstmLayerParams& p, const LstmLayerCache& cache,
                                     const std::vector<Vec>& dh_seq, LstmLayerParams& grads) {
    const auto hidden = static_cast<std::size_t>(p.hidden_dim);
    const std::size_t n = cache.steps.size();
    if (dh_seq.size() != n) throw ShapeMismatch("lstm_layer_backward: sequence length mismatch");

    std::vector<Vec> dx_seq(n);
    Vec dh_carry(hidden, 0.0), dc_carry(hidden, 0.0);
    Vec dh(hidden), dh_prev, dc_prev;
    for (std::size_t t = n; t-- > 0;) {
        for (std::size_t j = 0; j < hidden; ++j) dh[j] = dh_seq[t][j] + dh_carry[j];
        lstm_cell_backward(p, cache.steps[t], dh, dc_carry, grads, dx_seq[t], dh_prev, dc_prev);
        dh_carry = dh_prev;
        dc_carry = dc_prev;
    }
    return dx_seq;
}

}  // namespace n2c::nn

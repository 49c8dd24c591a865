#include "n2c/network.hpp"

#include <cmath>

namespace n2c::nn {

namespace {

bool has_conv(const ArchitectureSpec& s) { return s.variant != ArchVariant::kLstm5; }
bool has_lstm(const ArchitectureSpec& s) { return s.variant != ArchVariant::kConv1d; }

bool dropout_after_conv(const ArchitectureSpec& s, std::size_t conv_index) {
    if (s.dropout_rate <= 0.0) return false;
    if (s.variant == ArchVariant::kConvLstm) return true;            // after each conv
    if (s.variant == ArchVariant::kConv1d) return conv_index % 2 == 1;  // after every two layers
    return false;
}

std::vector<Vec> relu(const std::vector<Vec>& xs) {
    std::vector<Vec> out = xs;
    for (auto& v : out)
        for (auto& e : v) e = e > 0.0 ? e : 0.0;
    return out;
}

}  // namespace

void ArchitectureSpec::validate() const {
    if (input_dim < 1 || output_dim < 1)
        throw ShapeMismatch("ArchitectureSpec: input/output dims must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw Error("BadRate: dropout_rate must be in [0, 1)");
    switch (variant) {
        case ArchVariant::kLstm5:
            if (lstm_sizes.empty()) throw ShapeMismatch("Lstm5 needs at least one LSTM layer");
            if (!conv_layers.empty()) throw ShapeMismatch("Lstm5 takes no conv layers");
            break;
        case ArchVariant::kConvLstm:
            if (conv_layers.empty() || lstm_sizes.empty())
                throw ShapeMismatch("ConvLstm needs conv and LSTM layers");
            break;
        case ArchVariant::kConv1d:
            if (conv_layers.empty()) throw ShapeMismatch("Conv1d needs conv layers");
            if (!lstm_sizes.empty()) throw ShapeMismatch("Conv1d takes no LSTM layers");
            break;
    }
    for (int h : lstm_sizes)
        if (h < 1) throw ShapeMismatch("ArchitectureSpec: LSTM sizes must be >= 1");
    for (const auto& c : conv_layers) {
        if (c.channels < 1) throw ShapeMismatch("ArchitectureSpec: conv channels must be >= 1");
        if (c.kernel < 1 || c.kernel % 2 == 0)
            throw ShapeMismatch("ArchitectureSpec: conv kernels must be odd");
    }
}

std::string ArchitectureSpec::variant_name() const {
    switch (variant) {
        case ArchVariant::kLstm5: return "lstm5";
        case ArchVariant::kConvLstm: return "conv_lstm";
        case ArchVariant::kConv1d: return "conv1d";
    }
    return "?";
}

ArchitectureSpec ArchitectureSpec::with_lstm(std::vector<int> sizes) {
    ArchitectureSpec s;
    s.variant = ArchVariant::kLstm5;
    s.lstm_sizes = std::move(sizes);
    s.dropout_rate = 0.0;
    return s;
}

ArchitectureSpec ArchitectureSpec::with_conv_lstm(std::vector<ConvLayerSpec> convs,
                                                  std::vector<int> sizes) {
    ArchitectureSpec s;
    s.variant = ArchVariant::kConvLstm;
    s.conv_layers = std::move(convs);
    s.lstm_sizes = std::move(sizes);
    return s;
}

ArchitectureSpec ArchitectureSpec::with_conv(std::vector<ConvLayerSpec> convs) {
    ArchitectureSpec s;
    s.variant = ArchVariant::kConv1d;
    s.conv_layers = std::move(convs);
    s.lstm_sizes.clear();
    return s;
}

NetworkParams NetworkParams::zeros(const ArchitectureSpec& spec) {
    spec.validate();
    NetworkParams p;
    int dim = spec.input_dim;
    if (has_conv(spec)) {
        for (const auto& c : spec.conv_layers) {
            p.conv.emplace_back(c.channels, dim, c.kernel);
            dim = c.channels;
        }
    }
    if (has_lstm(spec)) {
        for (int h : spec.lstm_sizes) {
            p.lstm.emplace_back(dim, h);
            dim = h;
        }
    }
    p.head_w = Matrix(spec.output_dim, dim);
    p.head_b.assign(static_cast<std::size_t>(spec.output_dim), 0.0);
    return p;
}

Matrix glorot_uniform(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    const double bound = std::sqrt(6.0 / (static_cast<double>(rows) + static_cast<double>(cols)));
    for (auto& v : m.data) v = rng.uniform(-bound, bound);
    return m;
}

NetworkParams NetworkParams::glorot_init(const ArchitectureSpec& spec, Rng& rng) {
    NetworkParams p = zeros(spec);
    for (auto& c : p.conv) {
        // Receptive-field fans: fan_in = in_channels * kernel, fan_out =
        // out_channels * kernel. Biases stay zero.
        const double bound =
            std::sqrt(6.0 / (static_cast<double>(c.in_channels) * c.kernel +
                             static_cast<double>(c.out_channels) * c.kernel));
        for (auto& v : c.weights) v = rng.uniform(-bound, bound);
    }
    for (auto& layer : p.lstm) {
        for (LstmGateParams* g :
             {&layer.input_gate, &layer.forget_gate, &layer.output_gate, &layer.cell_gate}) {
            g->w_x = glorot_uniform(layer.hidden_dim, layer.input_dim, rng);
            g->w_h = glorot_uniform(layer.hidden_dim, layer.hidden_dim, rng);
        }
    }
    p.head_w = glorot_uniform(p.head_w.rows, p.head_w.cols, rng);
    return p;
}

std::size_t NetworkParams::param_count() const {
    std::size_t n = 0;
    for (const auto& c : conv) n += c.weights.size() + c.bias.size();
    for (const auto& l : lstm)
        for (const LstmGateParams* g : {&l.input_gate, &l.forget_gate, &l.output_gate, &l.cell_gate})
            n += g->w_x.size() + g->w_h.size() + g->b.size();
    return n + head_w.size() + head_b.size();
}

void NetworkParams::flatten(Vec& out) const {
    out.clear();
    out.reserve(param_count());
    auto push = [&out](const Vec& v) { out.insert(out.end(), v.begin(), v.end()); };
    for (const auto& c : conv) {
        push(c.weights);
        push(c.bias);
    }
    for (const auto& l : lstm)
        for (const LstmGateParams* g : {&l.input_gate, &l.forget_gate, &l.output_gate, &l.cell_gate}) {
            push(g->w_x.data);
            push(g->w_h.data);
            push(g->b);
        }
    push(head_w.data);
    push(head_b);
}

void NetworkParams::unflatten(const Vec& flat) {
    if (flat.size() != param_count()) throw ShapeMismatch("unflatten: size mismatch");
    std::size_t pos = 0;
    auto take = [&](Vec& v) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + v.size()), v.begin());
        pos += v.size();
    };
    for (auto& c : conv) {
        take(c.weights);
        take(c.bias);
    }
    for (auto& l : lstm)
        for (LstmGateParams* g : {&l.input_gate, &l.forget_gate, &l.output_gate, &l.cell_gate}) {
            take(g->w_x.data);
            take(g->w_h.data);
            take(g->b);
        }
    take(head_w.data);
    take(head_b);
}

std::vector<Vec> dropout(const std::vector<Vec>& xs, double rate, RunMode mode, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) throw Error("BadRate: dropout rate must be in [0, 1)");
    if (mode == RunMode::kEval || rate == 0.0) return xs;
    std::vector<Vec> out = xs;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (auto& v : out)
        for (auto& e : v) e = rng.uniform() < rate ? 0.0 : e * keep_scale;
    return out;
}

namespace {

// Dropout that records its mask (already folded with the survivor scale).
std::vector<Vec> dropout_masked(const std::vector<Vec>& xs, double rate, Rng& rng,
                                std::vector<Vec>& mask_out) {
    const double keep_scale = 1.0 / (1.0 - rate);
    std::vector<Vec> out = xs;
    mask_out.assign(xs.size(), Vec());
    for (std::size_t t = 0; t < xs.size(); ++t) {
        mask_out[t].resize(xs[t].size());
        for (std::size_t j = 0; j < xs[t].size(); ++j) {
            const double m = rng.uniform() < rate ? 0.0 : keep_scale;
            mask_out[t][j] = m;
            out[t][j] *= m;
        }
    }
    return out;
}

}  // namespace

std::vector<Vec> network_forward(const ArchitectureSpec& spec, const NetworkParams& params,
                                 const std::vector<Vec>& xs, RunMode mode, Rng& rng,
                                 NetworkCache& cache) {
    spec.validate();
    if (xs.empty()) throw ShapeMismatch("network_forward: empty input sequence");
    for (const auto& x : xs)
        if (x.size() != static_cast<std::size_t>(spec.input_dim))
            throw ShapeMismatch("network_forward: input dim mismatch");

    cache = NetworkCache{};
    cache.mode = mode;

    std::vector<Vec> seq = xs;
    for (std::size_t li = 0; li < params.conv.size(); ++li) {
        cache.conv_inputs.push_back(seq);
        std::vector<Vec> pre = conv1d_forward(params.conv[li], seq);
        cache.conv_pre.push_back(pre);
        seq = relu(pre);
        if (mode == RunMode::kTrain && dropout_after_conv(spec, li)) {
            std::vector<Vec> mask;
            seq = dropout_masked(seq, spec.dropout_rate, rng, mask);
            cache.dropout_masks.push_back(std::move(mask));
        }
    }

    cache.lstm.resize(params.lstm.size());
    for (std::size_t li = 0; li < params.lstm.size(); ++li)
        seq = lstm_layer_forward(params.lstm[li], seq, cache.lstm[li]);

    cache.head_in = seq;
    std::vector<Vec> out(seq.size(), Vec(static_cast<std::size_t>(spec.output_dim)));
    for (std::size_t t = 0; t < seq.size(); ++t) {
        Vec z = params.head_b;
        matvec_acc(params.head_w, seq[t], z);
        for (std::size_t j = 0; j < z.size(); ++j) out[t][j] = std::tanh(z[j]);
    }
    cache.outputs = out;
    return out;
}

NetworkParams network_backward(const ArchitectureSpec& spec, const NetworkParams& params,
                               const NetworkCache& cache, const std::vector<Vec>& dy) {
    if (dy.size() != cache.outputs.size())
        throw ShapeMismatch("network_backward: upstream gradient length mismatch");

    NetworkParams grads = NetworkParams::zeros(spec);

    // Dense tanh head.
    std::vector<Vec> dseq(cache.head_in.size(), Vec(cache.head_in.front().size(), 0.0));
    for (std::size_t t = 0; t < dy.size(); ++t) {
        Vec dz(dy[t].size());
        for (std::size_t j = 0; j < dy[t].size(); ++j) {
            const double y = cache.outputs[t][j];
            dz[j] = dy[t][j] * (1.0 - y * y);
        }
        outer_acc(grads.head_w, dz, cache.head_in[t]);
        for (std::size_t j = 0; j < dz.size(); ++j) grads.head_b[j] += dz[j];
        matvec_t_acc(params.head_w, dz, dseq[t]);
    }

    for (std::size_t li = params.lstm.size(); li-- > 0;)
        dseq = lstm_layer_backward(params.lstm[li], cache.lstm[li], dseq, grads.lstm[li]);

    std::size_t mask_index = cache.dropout_masks.size();
    for (std::size_t li = params.conv.size(); li-- > 0;) {
        if (cache.mode == RunMode::kTrain && dropout_after_conv(spec, li)) {
            const auto& mask = cache.dropout_masks[--mask_index];
            for (std::size_t t = 0; t < dseq.size(); ++t)
                for (std::size_t j = 0; j < dseq[t].size(); ++j) dseq[t][j] *= mask[t][j];
        }
        const auto& pre = cache.conv_pre[li];
        for (std::size_t t = 0; t < dseq.size(); ++t)
            for (std::size_t j = 0; j < dseq[t].size(); ++j)
                if (pre[t][j] <= 0.0) dseq[t][j] = 0.0;
        dseq = conv1d_backward(params.conv[li], cache.conv_inputs[li], dseq, grads.conv[li]);
    }

    return grads;
}

}  // namespace n2c::nn

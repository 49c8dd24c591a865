#include "n2c/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "n2c/adam.hpp"
#include "n2c/io.hpp"
#include "json.hpp"

namespace n2c::ctrl {

void TrainingConfig::validate() const {
    if (epochs < 1) throw DataError("TrainingConfig: epochs must be >= 1");
    if (batch_size < 1) throw DataError("TrainingConfig: batch_size must be >= 1");
    if (!(lr > 0.0)) throw DataError("TrainingConfig: lr must be > 0");
    if (decay < 0.0) throw DataError("TrainingConfig: decay must be >= 0");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw DataError("TrainingConfig: val_fraction must be in (0, 1)");
    loss.validate();
}

int resolve_thread_count(int configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("N2C_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw == 0 ? 1u : hw, 4u));
}

namespace {

// Per-sample loss + gradient; scale folds the batch averaging into dY.
double window_loss_grad(const nn::ArchitectureSpec& spec, const nn::NetworkParams& params,
                        const SequenceDataset& ds, std::size_t index, const nn::LossSpec& loss_spec,
                        double scale, std::uint64_t dropout_seed, nn::Vec& grad_out) {
    Rng dropout_rng(dropout_seed);
    nn::NetworkCache cache;
    const auto xs = ds.input_window(index);
    const auto out = nn::network_forward(spec, params, xs, nn::RunMode::kTrain, dropout_rng, cache);

    const int n = ds.window;
    const int v = SequenceDataset::kOutputDim;
    nn::Vec yhat(static_cast<std::size_t>(n) * v), ytrue(static_cast<std::size_t>(n) * v),
        dflat(static_cast<std::size_t>(n) * v);
    for (int t = 0; t < n; ++t) {
        const double* yt = ds.y_at(index, t);
        for (int c = 0; c < v; ++c) {
            yhat[static_cast<std::size_t>(t) * v + c] = out[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
            ytrue[static_cast<std::size_t>(t) * v + c] = yt[c];
        }
    }
    const double value = nn::loss(loss_spec, ytrue, yhat, dflat);

    std::vector<nn::Vec> dy(static_cast<std::size_t>(n), nn::Vec(static_cast<std::size_t>(v)));
    for (int t = 0; t < n; ++t)
        for (int c = 0; c < v; ++c)
            dy[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)] =
                dflat[static_cast<std::size_t>(t) * v + c] * scale;

    const nn::NetworkParams grads = nn::network_backward(spec, params, cache, dy);
    grads.flatten(grad_out);
    return value;
}

double eval_loss(const nn::ArchitectureSpec& spec, const nn::NetworkParams& params,
                 const SequenceDataset& ds, const nn::LossSpec& loss_spec) {
    Rng unused(0);
    nn::NetworkCache cache;
    double total = 0.0;
    const int v = SequenceDataset::kOutputDim;
    for (std::size_t w = 0; w < ds.count(); ++w) {
        const auto out =
            nn::network_forward(spec, params, ds.input_window(w), nn::RunMode::kEval, unused, cache);
        nn::Vec yhat, ytrue;
        for (int t = 0; t < ds.window; ++t) {
            const double* yt = ds.y_at(w, t);
            for (int c = 0; c < v; ++c) {
                yhat.push_back(out[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)]);
                ytrue.push_back(yt[c]);
            }
        }
        total += nn::loss_value(loss_spec, ytrue, yhat);
    }
    return total / static_cast<double>(ds.count());
}

}  // namespace

Checkpoint train(const SequenceDataset& raw, const nn::ArchitectureSpec& spec,
                 const TrainingConfig& cfg, const std::optional<nn::NetworkParams>& resume_params) {
    cfg.validate();
    spec.validate();
    if (raw.count() < 2) throw DataError("train: need at least 2 windows");

    // Contiguous tail split before any augmentation or normalization.
    const std::size_t total = raw.count();
    std::size_t val_count = static_cast<std::size_t>(std::floor(static_cast<double>(total) * cfg.val_fraction));
    val_count = std::clamp<std::size_t>(val_count, 1, total - 1);
    const std::size_t train_count = total - val_count;
    SequenceDataset train_ds = raw.slice(0, train_count);
    SequenceDataset val_ds = raw.slice(train_count, val_count);

    if (cfg.augment_enabled) {
        Rng aug_rng(seed_for(cfg.seed, SeedDomain::kAugment, 0));
        train_ds = augment(train_ds, cfg.augment, aug_rng);
    }
    if (static_cast<std::size_t>(cfg.batch_size) > train_ds.count())
        throw DataError("train: batch_size exceeds training window count");

    const NormalizationStats stats = fit_normalization(train_ds);
    apply_normalization(train_ds, stats);
    apply_normalization(val_ds, stats);

    nn::NetworkParams params;
    if (resume_params) {
        params = *resume_params;
    } else {
        Rng init_rng(seed_for(cfg.seed, SeedDomain::kParamInit, 0));
        params = nn::NetworkParams::glorot_init(spec, init_rng);
    }

    nn::Vec flat;
    params.flatten(flat);
    nn::AdamState adam(flat.size(), cfg.lr, cfg.decay);

    const int threads = resolve_thread_count(cfg.threads);
    const std::size_t n_train = train_ds.count();
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(seed_for(cfg.seed, SeedDomain::kShuffle, 0));

    std::vector<nn::Vec> sample_grads(static_cast<std::size_t>(cfg.batch_size));
    nn::Vec grad(flat.size());
    std::vector<double> sample_losses(static_cast<std::size_t>(cfg.batch_size));

    Checkpoint best;
    best.spec = spec;
    best.stats = stats;
    best.config = cfg;
    best.window = raw.window;
    best.seed = cfg.seed;
    best.best_val_loss = std::numeric_limits<double>::infinity();

    nn::Vec best_flat = flat;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t bsz = std::min(static_cast<std::size_t>(cfg.batch_size), n_train - start);
            const double scale = 1.0 / static_cast<double>(bsz);

            auto worker = [&](int tid) {
                for (std::size_t s = static_cast<std::size_t>(tid); s < bsz;
                     s += static_cast<std::size_t>(threads)) {
                    const std::size_t index = order[start + s];
                    const std::uint64_t dropout_seed =
                        seed_for(cfg.seed, SeedDomain::kDropout,
                                 static_cast<std::uint64_t>(epoch) * (n_train + 1) + index);
                    sample_losses[s] = window_loss_grad(spec, params, train_ds, index, cfg.loss,
                                                        scale, dropout_seed, sample_grads[s]);
                }
            };
            if (threads > 1) {
                std::vector<std::thread> pool;
                pool.reserve(static_cast<std::size_t>(threads));
                for (int tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
                for (auto& th : pool) th.join();
            } else {
                worker(0);
            }

            // Deterministic reduction in slot order, independent of the
            // thread count.
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t s = 0; s < bsz; ++s) {
                batch_loss += sample_losses[s] * scale;
                const nn::Vec& g = sample_grads[s];
                for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
            }
            if (!std::isfinite(batch_loss))
                throw DataError("NonFiniteLoss: epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(batches));

            nn::clip_global_norm(grad, cfg.clip_norm);
            adam_step(adam, flat, grad);
            params.unflatten(flat);

            epoch_loss += batch_loss;
            ++batches;
        }

        EpochStats es;
        es.train_loss = epoch_loss / static_cast<double>(batches);
        es.val_loss = eval_loss(spec, params, val_ds, cfg.loss);
        if (!std::isfinite(es.val_loss))
            throw DataError("NonFiniteLoss: validation diverged at epoch " + std::to_string(epoch));
        best.curve.push_back(es);

        if (es.val_loss < best.best_val_loss) {
            best.best_val_loss = es.val_loss;
            best.best_epoch = epoch;
            best_flat = flat;
        }
    }

    best.final_train_loss = best.curve.back().train_loss;
    best.final_val_loss = best.curve.back().val_loss;
    best.params = nn::NetworkParams::zeros(spec);
    best.params.unflatten(best_flat);
    return best;
}

std::array<double, 3> predict(const Checkpoint& ckpt,
                              const std::vector<std::array<double, 2>>& history) {
    Rng unused(0);
    return predict_noisy(ckpt, history, 0.0, unused);
}

std::array<double, 3> predict_noisy(const Checkpoint& ckpt,
                                    const std::vector<std::array<double, 2>>& history,
                                    double noise_sigma, Rng& rng) {
    if (history.empty()) throw DataError("BadHistory: empty history");
    if (ckpt.window < 1) throw DataError("checkpoint carries no window length");
    for (const auto& h : history)
        if (!std::isfinite(h[0]) || !std::isfinite(h[1]))
            throw DataError("BadHistory: non-finite input");

    const auto window = static_cast<std::size_t>(ckpt.window);
    const std::size_t used = std::min(history.size(), window);
    const std::size_t deficit = window - used;
    const std::size_t first = history.size() - used;

    std::vector<nn::Vec> xs(window, nn::Vec(2));
    for (std::size_t t = 0; t < window; ++t) {
        // Left-pad short histories by repeating the oldest sample.
        const std::size_t src = t < deficit ? first : first + (t - deficit);
        const auto& h = history[src];
        xs[t][0] = ckpt.stats.standardize(0, h[0]);
        xs[t][1] = ckpt.stats.standardize(1, h[1]);
        if (noise_sigma > 0.0) {
            xs[t][0] += rng.normal(0.0, noise_sigma);
            xs[t][1] += rng.normal(0.0, noise_sigma);
        }
    }

    Rng unused(0);
    nn::NetworkCache cache;
    const auto out =
        nn::network_forward(ckpt.spec, ckpt.params, xs, nn::RunMode::kEval, unused, cache);
    const nn::Vec& last = out.back();
    std::array<double, 3> triple{};
    for (int c = 0; c < 3; ++c)
        triple[static_cast<std::size_t>(c)] =
            NormalizationStats::unscale_target(c, last[static_cast<std::size_t>(c)]);
    return NormalizationStats::clamp_physical(triple);
}

// --- serialization -----------------------------------------------------------

namespace {

nlohmann::json arch_to_json(const nn::ArchitectureSpec& spec) {
    nlohmann::json j;
    j["variant"] = spec.variant_name();
    j["lstm_sizes"] = spec.lstm_sizes;
    nlohmann::json convs = nlohmann::json::array();
    for (const auto& c : spec.conv_layers) convs.push_back({{"channels", c.channels}, {"kernel", c.kernel}});
    j["conv_layers"] = convs;
    j["input_dim"] = spec.input_dim;
    j["output_dim"] = spec.output_dim;
    j["dropout_rate"] = spec.dropout_rate;
    return j;
}

nn::ArchitectureSpec arch_from_json(const nlohmann::json& j) {
    nn::ArchitectureSpec spec;
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "lstm5")
        spec.variant = nn::ArchVariant::kLstm5;
    else if (variant == "conv_lstm")
        spec.variant = nn::ArchVariant::kConvLstm;
    else if (variant == "conv1d")
        spec.variant = nn::ArchVariant::kConv1d;
    else
        throw Error("unknown architecture variant: " + variant);
    spec.lstm_sizes = j.at("lstm_sizes").get<std::vector<int>>();
    spec.conv_layers.clear();
    for (const auto& c : j.at("conv_layers"))
        spec.conv_layers.push_back({c.at("channels").get<int>(), c.at("kernel").get<int>()});
    spec.input_dim = j.at("input_dim").get<int>();
    spec.output_dim = j.at("output_dim").get<int>();
    spec.dropout_rate = j.at("dropout_rate").get<double>();
    spec.validate();
    return spec;
}

nlohmann::json training_config_to_json(const TrainingConfig& cfg) {
    nlohmann::json j;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["lr"] = cfg.lr;
    j["decay"] = cfg.decay;
    j["loss"] = to_string(cfg.loss.kind);
    j["huber_delta"] = cfg.loss.delta;
    j["seed"] = cfg.seed;
    j["clip_norm"] = cfg.clip_norm;
    j["val_fraction"] = cfg.val_fraction;
    j["augment_enabled"] = cfg.augment_enabled;
    j["augment"] = {{"flip", cfg.augment.flip},     {"warp", cfg.augment.warp},
                    {"noise", cfg.augment.noise},   {"warp_lo", cfg.augment.warp_lo},
                    {"warp_hi", cfg.augment.warp_hi}, {"noise_sigma", cfg.augment.noise_sigma}};
    return j;
}

TrainingConfig training_config_from_json(const nlohmann::json& j) {
    TrainingConfig cfg;
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.lr = j.at("lr").get<double>();
    cfg.decay = j.at("decay").get<double>();
    cfg.loss.kind = nn::loss_kind_from_string(j.at("loss").get<std::string>());
    cfg.loss.delta = j.at("huber_delta").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.clip_norm = j.at("clip_norm").get<double>();
    cfg.val_fraction = j.at("val_fraction").get<double>();
    cfg.augment_enabled = j.at("augment_enabled").get<bool>();
    const auto& a = j.at("augment");
    cfg.augment.flip = a.at("flip").get<bool>();
    cfg.augment.warp = a.at("warp").get<bool>();
    cfg.augment.noise = a.at("noise").get<bool>();
    cfg.augment.warp_lo = a.at("warp_lo").get<double>();
    cfg.augment.warp_hi = a.at("warp_hi").get<double>();
    cfg.augment.noise_sigma = a.at("noise_sigma").get<double>();
    return cfg;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "n2c-checkpoint-v1";
    j["architecture"] = arch_to_json(ckpt.spec);
    nn::Vec flat;
    ckpt.params.flatten(flat);
    j["parameters"] = flat;  // conv layers, then LSTM gates (i,f,o,c) as W_x,W_h,b, then head
    j["normalization"] = {{"in_mean", ckpt.stats.in_mean},
                          {"in_std", ckpt.stats.in_std},
                          {"degenerate", ckpt.stats.degenerate}};
    j["training"] = training_config_to_json(ckpt.config);
    j["window"] = ckpt.window;
    j["seed"] = ckpt.seed;
    j["best_epoch"] = ckpt.best_epoch;
    j["best_val_loss"] = ckpt.best_val_loss;
    j["final_train_loss"] = ckpt.final_train_loss;
    j["final_val_loss"] = ckpt.final_val_loss;
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& e : ckpt.curve) curve.push_back({{"train", e.train_loss}, {"val", e.val_loss}});
    j["curve"] = curve;
    atomic_write_file(path, j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (j.value("format", std::string{}) != "n2c-checkpoint-v1")
        throw Error("not an n2c checkpoint: " + path.string());
    Checkpoint ckpt;
    ckpt.spec = arch_from_json(j.at("architecture"));
    ckpt.params = nn::NetworkParams::zeros(ckpt.spec);
    const nn::Vec flat = j.at("parameters").get<nn::Vec>();
    ckpt.params.unflatten(flat);
    const auto& norm = j.at("normalization");
    ckpt.stats.in_mean = norm.at("in_mean").get<std::array<double, 2>>();
    ckpt.stats.in_std = norm.at("in_std").get<std::array<double, 2>>();
    ckpt.stats.degenerate = norm.at("degenerate").get<std::array<bool, 2>>();
    ckpt.config = training_config_from_json(j.at("training"));
    ckpt.window = j.at("window").get<int>();
    ckpt.seed = j.at("seed").get<std::uint64_t>();
    ckpt.best_epoch = j.at("best_epoch").get<int>();
    ckpt.best_val_loss = j.at("best_val_loss").get<double>();
    ckpt.final_train_loss = j.at("final_train_loss").get<double>();
    ckpt.final_val_loss = j.at("final_val_loss").get<double>();
    for (const auto& e : j.at("curve"))
        ckpt.curve.push_back({e.at("train").get<double>(), e.at("val").get<double>()});
    return ckpt;
}

}  // namespace n2c::ctrl

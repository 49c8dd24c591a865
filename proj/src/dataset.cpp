#include "n2c/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace n2c::ctrl {

std::vector<nn::Vec> SequenceDataset::input_window(std::size_t r) const {
    std::vector<nn::Vec> out(static_cast<std::size_t>(window), nn::Vec(kInputDim));
    for (int t = 0; t < window; ++t) {
        const double* p = x_at(r, t);
        out[static_cast<std::size_t>(t)] = {p[0], p[1]};
    }
    return out;
}

std::vector<nn::Vec> SequenceDataset::target_window(std::size_t r) const {
    std::vector<nn::Vec> out(static_cast<std::size_t>(window), nn::Vec(kOutputDim));
    for (int t = 0; t < window; ++t) {
        const double* p = y_at(r, t);
        out[static_cast<std::size_t>(t)] = {p[0], p[1], p[2]};
    }
    return out;
}

void SequenceDataset::append(const SequenceDataset& other) {
    if (window == 0) {
        *this = other;
        return;
    }
    if (other.window != window) throw DataError("SequenceDataset::append: window length mismatch");
    x.insert(x.end(), other.x.begin(), other.x.end());
    y.insert(y.end(), other.y.begin(), other.y.end());
}

SequenceDataset SequenceDataset::slice(std::size_t first, std::size_t n) const {
    if (first + n > count()) throw DataError("SequenceDataset::slice: out of range");
    SequenceDataset out;
    out.window = window;
    const std::size_t xs = static_cast<std::size_t>(window) * kInputDim;
    const std::size_t ys = static_cast<std::size_t>(window) * kOutputDim;
    out.x.assign(x.begin() + static_cast<std::ptrdiff_t>(first * xs),
                 x.begin() + static_cast<std::ptrdiff_t>((first + n) * xs));
    out.y.assign(y.begin() + static_cast<std::ptrdiff_t>(first * ys),
                 y.begin() + static_cast<std::ptrdiff_t>((first + n) * ys));
    return out;
}

SequenceDataset build_dataset(const std::vector<can::DriveRecord>& records, int window, int stride) {
    if (window < 1) throw DataError("build_dataset: window must be >= 1");
    if (stride < 1) throw DataError("build_dataset: stride must be >= 1");
    if (records.size() < static_cast<std::size_t>(window))
        throw DataError("StreamTooShort: " + std::to_string(records.size()) + " records < window " +
                        std::to_string(window));

    if (records.size() >= 3) {
        const double dt0 = records[1].t - records[0].t;
        for (std::size_t i = 1; i + 1 < records.size(); ++i) {
            const double dt = records[i + 1].t - records[i].t;
            if (std::abs(dt - dt0) > 1e-6)
                throw DataError("NonUniformRate: dt varies at record " + std::to_string(i));
        }
    }

    SequenceDataset ds;
    ds.window = window;
    const std::size_t r =
        (records.size() - static_cast<std::size_t>(window)) / static_cast<std::size_t>(stride) + 1;
    ds.x.reserve(r * static_cast<std::size_t>(window) * SequenceDataset::kInputDim);
    ds.y.reserve(r * static_cast<std::size_t>(window) * SequenceDataset::kOutputDim);
    for (std::size_t w = 0; w < r; ++w) {
        const std::size_t base = w * static_cast<std::size_t>(stride);
        for (int t = 0; t < window; ++t) {
            const auto& rec = records[base + static_cast<std::size_t>(t)];
            ds.x.push_back(rec.speed);
            ds.x.push_back(rec.steering);
            ds.y.push_back(rec.throttle);
            ds.y.push_back(rec.brake);
            ds.y.push_back(rec.torque);
        }
    }
    return ds;
}

std::array<double, 3> NormalizationStats::clamp_physical(std::array<double, 3> triple) {
    triple[0] = std::clamp(triple[0], 0.0, 1.0);
    triple[1] = std::clamp(triple[1], 0.0, 1.0);
    triple[2] = std::clamp(triple[2], -1.0, 1.0);
    return triple;
}

NormalizationStats fit_normalization(const SequenceDataset& ds) {
    if (ds.count() == 0) throw DataError("fit_normalization: empty dataset");
    NormalizationStats stats;
    const std::size_t n = ds.x.size() / SequenceDataset::kInputDim;
    for (int c = 0; c < SequenceDataset::kInputDim; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += ds.x[i * SequenceDataset::kInputDim + static_cast<std::size_t>(c)];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ds.x[i * SequenceDataset::kInputDim + static_cast<std::size_t>(c)] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        stats.in_mean[static_cast<std::size_t>(c)] = mean;
        double sd = std::sqrt(var);
        if (sd == 0.0) {  // DegenerateChannel: flag and carry on with std 1
            sd = 1.0;
            stats.degenerate[static_cast<std::size_t>(c)] = true;
        }
        stats.in_std[static_cast<std::size_t>(c)] = sd;
    }
    return stats;
}

void apply_normalization(SequenceDataset& ds, const NormalizationStats& stats) {
    const std::size_t nx = ds.x.size() / SequenceDataset::kInputDim;
    for (std::size_t i = 0; i < nx; ++i)
        for (int c = 0; c < SequenceDataset::kInputDim; ++c) {
            auto& v = ds.x[i * SequenceDataset::kInputDim + static_cast<std::size_t>(c)];
            v = stats.standardize(c, v);
        }
    const std::size_t ny = ds.y.size() / SequenceDataset::kOutputDim;
    for (std::size_t i = 0; i < ny; ++i)
        for (int c = 0; c < SequenceDataset::kOutputDim; ++c) {
            auto& v = ds.y[i * SequenceDataset::kOutputDim + static_cast<std::size_t>(c)];
            v = NormalizationStats::scale_target(c, v);
        }
}

namespace {

void flip_window(const SequenceDataset& src, std::size_t r, SequenceDataset& dst) {
    for (int t = 0; t < src.window; ++t) {
        const double* xs = src.x_at(r, t);
        const double* ys = src.y_at(r, t);
        dst.x.push_back(xs[0]);
        dst.x.push_back(-xs[1]);  // mirrored steering
        dst.y.push_back(ys[0]);
        dst.y.push_back(ys[1]);
        dst.y.push_back(-ys[2]);  // mirrored torque
    }
}

// Resample the window in time by `factor`, linear interpolation, output
// length unchanged. Sample position for output index i is i * factor,
// clamped to the window.
void warp_window(const SequenceDataset& src, std::size_t r, double factor, SequenceDataset& dst) {
    const int n = src.window;
    for (int t = 0; t < n; ++t) {
        double pos = static_cast<double>(t) * factor;
        pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
        const int lo = static_cast<int>(pos);
        const int hi = std::min(lo + 1, n - 1);
        const double u = pos - static_cast<double>(lo);
        const double* xl = src.x_at(r, lo);
        const double* xh = src.x_at(r, hi);
        const double* yl = src.y_at(r, lo);
        const double* yh = src.y_at(r, hi);
        for (int c = 0; c < SequenceDataset::kInputDim; ++c)
            dst.x.push_back(xl[c] + (xh[c] - xl[c]) * u);
        for (int c = 0; c < SequenceDataset::kOutputDim; ++c)
            dst.y.push_back(yl[c] + (yh[c] - yl[c]) * u);
    }
}

}  // namespace

SequenceDataset augment(const SequenceDataset& ds, const AugmentConfig& cfg, Rng& rng) {
    SequenceDataset out = ds;
    const std::size_t r = ds.count();

    if (cfg.flip)
        for (std::size_t w = 0; w < r; ++w) flip_window(ds, w, out);

    if (cfg.warp)
        for (std::size_t w = 0; w < r; ++w)
            warp_window(ds, w, rng.uniform(cfg.warp_lo, cfg.warp_hi), out);

    if (cfg.noise) {
        // Sigma is expressed in standardized units; scale by the raw channel
        // spread so augmentation can run before normalization.
        const NormalizationStats stats = fit_normalization(ds);
        const std::size_t start = out.x.size();
        out.x.insert(out.x.end(), ds.x.begin(), ds.x.end());
        out.y.insert(out.y.end(), ds.y.begin(), ds.y.end());
        for (std::size_t i = start; i < out.x.size(); ++i) {
            const int c = static_cast<int>((i - start) % SequenceDataset::kInputDim);
            out.x[i] += rng.normal(0.0, cfg.noise_sigma * stats.in_std[static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

}  // namespace n2c::ctrl

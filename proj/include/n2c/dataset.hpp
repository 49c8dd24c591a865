#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "n2c/can_codec.hpp"
#include "n2c/matrix.hpp"
#include "n2c/rng.hpp"

namespace n2c::ctrl {

struct DataError : Error {
    using Error::Error;
};

// Sliding windows over a uniform-rate record stream, stored flat:
// inputs  r x n x 2  (speed, steering)
// targets r x n x 3  (throttle, brake, torque)
struct SequenceDataset {
    static constexpr int kInputDim = 2;
    static constexpr int kOutputDim = 3;

    int window = 0;
    std::vector<double> x;
    std::vector<double> y;

    std::size_t count() const {
        return window == 0 ? 0 : x.size() / (static_cast<std::size_t>(window) * kInputDim);
    }

    double* x_at(std::size_t r, int t) {
        return x.data() + (r * static_cast<std::size_t>(window) + static_cast<std::size_t>(t)) * kInputDim;
    }
    const double* x_at(std::size_t r, int t) const {
        return x.data() + (r * static_cast<std::size_t>(window) + static_cast<std::size_t>(t)) * kInputDim;
    }
    double* y_at(std::size_t r, int t) {
        return y.data() + (r * static_cast<std::size_t>(window) + static_cast<std::size_t>(t)) * kOutputDim;
    }
    const double* y_at(std::size_t r, int t) const {
        return y.data() + (r * static_cast<std::size_t>(window) + static_cast<std::size_t>(t)) * kOutputDim;
    }

    // Window r as a sequence of input vectors (for the network).
    std::vector<nn::Vec> input_window(std::size_t r) const;
    std::vector<nn::Vec> target_window(std::size_t r) const;

    void append(const SequenceDataset& other);
    SequenceDataset slice(std::size_t first, std::size_t n) const;
};

// Windows of length `window` at the given stride; requires a uniform-rate
// stream (as produced by resample_records or the 20 Hz simulator).
SequenceDataset build_dataset(const std::vector<can::DriveRecord>& records, int window, int stride);

// Input standardization plus the fixed affine map taking targets onto the
// tanh range: throttle/brake [0,1] -> [-1,1] via 2y-1, torque unchanged.
struct NormalizationStats {
    std::array<double, 2> in_mean{0.0, 0.0};
    std::array<double, 2> in_std{1.0, 1.0};
    std::array<bool, 2> degenerate{false, false};  // std was 0, forced to 1

    static constexpr std::array<double, 3> kOutScale{2.0, 2.0, 1.0};
    static constexpr std::array<double, 3> kOutOffset{-1.0, -1.0, 0.0};

    double standardize(int channel, double v) const {
        return (v - in_mean[static_cast<std::size_t>(channel)]) / in_std[static_cast<std::size_t>(channel)];
    }
    double destandardize(int channel, double v) const {
        return v * in_std[static_cast<std::size_t>(channel)] + in_mean[static_cast<std::size_t>(channel)];
    }
    static double scale_target(int channel, double v) {
        return kOutScale[static_cast<std::size_t>(channel)] * v + kOutOffset[static_cast<std::size_t>(channel)];
    }
    static double unscale_target(int channel, double v) {
        return (v - kOutOffset[static_cast<std::size_t>(channel)]) / kOutScale[static_cast<std::size_t>(channel)];
    }

    // Physical clamp applied on inversion.
    static std::array<double, 3> clamp_physical(std::array<double, 3> triple);
};

NormalizationStats fit_normalization(const SequenceDataset& ds);
void apply_normalization(SequenceDataset& ds, const NormalizationStats& stats);

struct AugmentConfig {
    bool flip = true;
    bool warp = true;
    bool noise = true;
    double warp_lo = 0.9;
    double warp_hi = 1.1;
    double noise_sigma = 0.01;  // in standardized input units
};

// Appends one transformed copy per enabled augmentation, originals first:
//   flip  - negate steering (input) and torque (target)
//   warp  - time-rescale each window by a random factor, linear interpolation
//   noise - Gaussian noise on inputs only, sigma scaled by channel std
SequenceDataset augment(const SequenceDataset& ds, const AugmentConfig& cfg, Rng& rng);

}  // namespace n2c::ctrl

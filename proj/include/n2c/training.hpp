#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "n2c/dataset.hpp"
#include "n2c/loss.hpp"
#include "n2c/network.hpp"

namespace n2c::ctrl {

struct TrainingConfig {
    int epochs = 50;
    int batch_size = 32;
    double lr = 0.008;
    double decay = 0.0001;
    nn::LossSpec loss{nn::LossKind::kHuber, 1.0};
    std::uint64_t seed = 1;
    double clip_norm = 5.0;   // global-norm gradient clip, <= 0 disables
    double val_fraction = 0.1;
    bool augment_enabled = false;
    AugmentConfig augment{};
    int threads = 0;  // 0 = N2C_THREADS env, else min(hardware, 4)

    void validate() const;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct Checkpoint {
    nn::ArchitectureSpec spec;
    nn::NetworkParams params;
    NormalizationStats stats;
    TrainingConfig config;
    int window = 0;  // timesteps per training window
    std::uint64_t seed = 0;
    int best_epoch = -1;
    double best_val_loss = 0.0;
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;
    std::vector<EpochStats> curve;
};

// Minibatch BPTT over scaled targets. The validation split is the contiguous
// tail (window overlap leaks across random splits); augmentation, when
// enabled, touches only the training portion; normalization stats come from
// the training portion. Returns the best-validation checkpoint.
Checkpoint train(const SequenceDataset& raw, const nn::ArchitectureSpec& spec,
                 const TrainingConfig& cfg,
                 const std::optional<nn::NetworkParams>& resume_params = std::nullopt);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Eval-mode prediction from the last `window` (speed, steering) pairs.
// Shorter histories are left-padded by repeating the oldest sample; outputs
// are denormalized and clamped to their physical ranges.
std::array<double, 3> predict(const Checkpoint& ckpt,
                              const std::vector<std::array<double, 2>>& history);

// predict() with Gaussian noise of the given sigma added to the
// standardized inputs (the noise-robustness study's inference path).
std::array<double, 3> predict_noisy(const Checkpoint& ckpt,
                                    const std::vector<std::array<double, 2>>& history,
                                    double noise_sigma, Rng& rng);

int resolve_thread_count(int configured);

}  // namespace n2c::ctrl

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2c/closed_loop.hpp"
#include "n2c/metrics.hpp"
#include "n2c/training.hpp"

namespace n2c::eval {

struct MetricRow {
    std::string arch;      // lstm5 | conv_lstm | conv1d | pid
    std::string pairing;   // human | pp_nn | pp_pid | mpc_nn | mpc_pid | human_noise
    std::string loss;      // smooth_l1 | mse | -
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    double rmse = 0.0;
    double mae = 0.0;
    std::array<double, 3> rmse_channel{};
    std::array<double, 3> mae_channel{};
};

MetricRow metric_row_from(const TripleMetrics& m, std::string arch, std::string pairing,
                          std::string loss, std::uint64_t seed);

using RecordEpisodes = std::vector<std::vector<can::DriveRecord>>;

// Open-loop "human driving" column: slide windows over held-out expert
// records (never across episode boundaries), predict the last-step triple,
// compare against the recorded one.
TripleMetrics evaluate_expert_replay(const ctrl::Checkpoint& ckpt, const RecordEpisodes& episodes,
                                     int stride);

// Same path with Gaussian noise on the standardized inputs at inference.
TripleMetrics evaluate_expert_replay_noisy(const ctrl::Checkpoint& ckpt, const RecordEpisodes& episodes,
                                           int stride, double sigma, std::uint64_t noise_seed);

// Closed-loop pairing: run the episode, rebuild the noise-free expert's
// triples on the logged command stream, and score the controller against
// that reference. Warmup steps are skipped (cold-start window padding).
struct PairingOutcome {
    TripleMetrics metrics;
    bool off_route = false;
};

PairingOutcome evaluate_tracker_pairing(const sim::Route& route, const ctrl::ClosedLoopConfig& cfg,
                                        int warmup_steps);

struct NoiseStudyConfig {
    double mu = 0.0;
    double sigma = 1.0;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

    void validate() const {
        if (sigma < 0.0) throw Error("NoiseStudyConfig: sigma must be >= 0");
        if (seeds.empty()) throw Error("NoiseStudyConfig: needs at least one seed");
    }
};

// Clean row plus one noisy row per seed for one checkpoint.
std::vector<MetricRow> noise_study(const ctrl::Checkpoint& ckpt, const std::string& arch_label,
                                   const std::string& loss_label, const RecordEpisodes& episodes,
                                   int stride, const NoiseStudyConfig& cfg);

// --- report rendering --------------------------------------------------------
inline const char* kReportCsvHeader =
    "arch,pairing,loss,seed,n,rmse,mae,rmse_throttle,rmse_brake,rmse_torque,"
    "mae_throttle,mae_brake,mae_torque";

std::string rows_to_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> rows_from_csv(const std::string& content);

// Markdown tables grouped like the published comparison: one table per loss,
// architectures as rows, pairings as column groups.
std::string render_markdown(const std::vector<MetricRow>& rows);

// Per-channel long-format CSV backing the bar-chart style breakdowns.
std::string render_channel_breakdown(const std::vector<MetricRow>& rows);

// Writes report.csv, report.md, channel_breakdown.csv into out_dir.
void render_report(const std::vector<MetricRow>& rows, const std::filesystem::path& out_dir);

}  // namespace n2c::eval

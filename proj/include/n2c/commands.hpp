#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "n2c/config.hpp"

namespace n2c::cli {

// Signal definitions for the synthetic vehicle's bus, used when re-encoding
// simulator output as candump logs and by the decode fixtures.
std::vector<can::SignalDef> simulator_signal_defs();

// candump log -> DriveRecord CSV. An empty log produces a header-only CSV
// and a warning instead of an error.
void cmd_decode(const std::filesystem::path& log_path, const std::filesystem::path& spec_path,
                const std::filesystem::path& out_csv, double rate_hz, std::ostream& diag);

// Ranked arbitration-id report from stimulus windows.
void cmd_discover(const std::filesystem::path& log_path, const std::filesystem::path& windows_path,
                  const std::filesystem::path& spec_path,
                  const std::optional<std::filesystem::path>& out_csv, std::ostream& report);

struct CollectResult {
    std::size_t episodes = 0;
    std::size_t records = 0;
    std::size_t window_capacity = 0;  // stride-1 windows available from this data
};

// Drives the scripted expert over the configured routes and writes
// records_XXX.csv / pose_XXX.csv per episode (plus candump re-encodings when
// asked). `use_eval_routes` collects held-out test data instead.
CollectResult cmd_collect(const ExperimentConfig& cfg, bool use_eval_routes,
                          const std::filesystem::path& out_dir, bool emit_candump,
                          std::ostream& diag);

struct TrainResult {
    std::filesystem::path checkpoint_path;
    double best_val_loss = 0.0;
    int best_epoch = -1;
};

TrainResult cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                      const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& resume, std::ostream& diag);

// Full pairing matrix for the given checkpoints; writes report.csv/.md and
// channel_breakdown.csv.
std::vector<eval::MetricRow> cmd_eval(const ExperimentConfig& cfg,
                                      const std::vector<std::filesystem::path>& checkpoints,
                                      const std::filesystem::path& test_data_dir,
                                      const std::filesystem::path& out_dir, std::ostream& diag);

std::vector<eval::MetricRow> cmd_noise(const ExperimentConfig& cfg,
                                       const std::vector<std::filesystem::path>& checkpoints,
                                       const std::filesystem::path& test_data_dir,
                                       const std::filesystem::path& out_dir, std::ostream& diag);

// One episode of the named pairing; writes episode.csv and summary.txt.
void cmd_closed_loop(const ExperimentConfig& cfg, const std::string& pairing,
                     const std::optional<std::filesystem::path>& checkpoint,
                     const std::filesystem::path& out_dir, std::ostream& diag);

void cmd_report(const std::vector<std::filesystem::path>& row_csvs,
                const std::filesystem::path& out_dir);

// --- helpers shared with tests ------------------------------------------------
eval::RecordEpisodes load_record_episodes(const std::filesystem::path& dir);
ctrl::SequenceDataset dataset_from_episodes(const eval::RecordEpisodes& episodes, int window,
                                            int stride);

ctrl::ClosedLoopConfig closed_loop_config(const ExperimentConfig& cfg, const std::string& pairing,
                                          const ctrl::Checkpoint* ckpt);

}  // namespace n2c::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2c/closed_loop.hpp"
#include "n2c/evaluation.hpp"

namespace n2c::cli {

struct RouteSpec {
    sim::RouteKind kind = sim::RouteKind::kFigure8;
    sim::RouteGenParams params{};
    double duration = 120.0;       // s of driving on this route
    std::uint64_t seed_offset = 0; // distinguishes spline routes

    sim::Route build(std::uint64_t root_seed) const;
};

// Everything one experiment needs, loadable from a JSON file. Flag overrides
// (seed, out_dir, profile) win over file contents.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string profile = "desk";  // desk | paper
    double rate_hz = 20.0;
    double dt = 0.05;

    sim::VehicleParams vehicle{};
    sim::ExpertConfig expert{};

    ctrl::TrackerKind tracker = ctrl::TrackerKind::kPurePursuit;
    track::PurePursuitConfig pursuit{};
    track::MpcConfig mpc{};

    pid::PidGains pid_longitudinal = pid::default_longitudinal_gains();
    pid::LongitudinalSplit pid_split = pid::default_split();
    pid::PidGains pid_lateral = pid::default_lateral_gains();

    std::vector<RouteSpec> collect_routes;
    std::vector<RouteSpec> eval_routes;

    int window = 10;
    int stride = 1;
    bool augment_enabled = false;
    ctrl::AugmentConfig augment{};

    nn::ArchitectureSpec architecture = nn::ArchitectureSpec::desk_lstm5();
    ctrl::TrainingConfig training{};

    std::vector<std::string> pairings{"human", "pp_nn", "pp_pid", "mpc_nn", "mpc_pid"};
    double episode_duration = 90.0;
    int eval_stride = 2;
    int warmup_steps = 10;
    ctrl::InputSource input_source = ctrl::InputSource::kCommands;

    eval::NoiseStudyConfig noise{};

    std::filesystem::path out_dir = "out";

    void validate() const;
};

ExperimentConfig default_config();
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

// Applies the desk/paper profile presets (architecture sizes, epoch count)
// on top of a config; explicit JSON fields already set stay untouched by
// load_config, so this only runs when the profile flag changes.
void apply_profile(ExperimentConfig& cfg, const std::string& profile);

}  // namespace n2c::cli

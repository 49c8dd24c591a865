#pragma once

#include <deque>
#include <string>

#include "n2c/expert.hpp"
#include "n2c/path_tracking.hpp"
#include "n2c/pid.hpp"
#include "n2c/training.hpp"
#include "n2c/vehicle_sim.hpp"

namespace n2c::ctrl {

enum class TrackerKind { kPurePursuit, kMpc };
enum class ControllerKind { kN2c, kPid, kExpert };
enum class InputSource { kCommands, kMeasured };

TrackerKind tracker_kind_from_string(const std::string& s);
ControllerKind controller_kind_from_string(const std::string& s);
std::string to_string(TrackerKind kind);
std::string to_string(ControllerKind kind);

struct EpisodeRow {
    double t = 0.0;
    double x = 0.0, y = 0.0, yaw = 0.0;
    double speed = 0.0, steering = 0.0;
    double cmd_v = 0.0, cmd_omega = 0.0, cmd_steering = 0.0;
    double throttle = 0.0, brake = 0.0, torque = 0.0;
};

struct EpisodeLog {
    std::string source;  // expert | n2c | pid
    std::vector<EpisodeRow> rows;
    std::vector<can::DriveRecord> records;  // filled for expert episodes
    bool off_route = false;
    double off_route_t = 0.0;
};

struct ClosedLoopConfig {
    sim::VehicleParams vehicle{};
    TrackerKind tracker = TrackerKind::kPurePursuit;
    track::PurePursuitConfig pursuit{};
    track::MpcConfig mpc{};

    ControllerKind controller = ControllerKind::kPid;
    const Checkpoint* checkpoint = nullptr;  // for kN2c
    InputSource input_source = InputSource::kCommands;
    pid::PidGains pid_longitudinal = pid::default_longitudinal_gains();
    pid::LongitudinalSplit pid_split = pid::default_split();
    pid::PidGains pid_lateral = pid::default_lateral_gains();
    sim::ExpertConfig expert{};
    bool expert_noise = true;
    std::uint64_t noise_seed = 0;

    double duration = 60.0;
    double dt = 0.05;
    // Evaluation episodes start rolling at the route speed; data-collection
    // episodes start from rest so launches appear in the training data.
    bool start_at_route_speed = false;
};

// Runs one tracker+controller episode on the route. Leaving the route ends
// the episode with off_route set rather than failing.
EpisodeLog closed_loop_run(const sim::Route& route, const ClosedLoopConfig& cfg);

std::string episode_to_csv(const EpisodeLog& log);
EpisodeLog episode_from_csv(const std::string& content);

// The deterministic reference: replay the noise-free expert policy over the
// episode's logged command/measurement stream.
std::vector<std::array<double, 3>> expert_reference_triples(const EpisodeLog& log,
                                                            const sim::ExpertConfig& expert,
                                                            double dt);

}  // namespace n2c::ctrl

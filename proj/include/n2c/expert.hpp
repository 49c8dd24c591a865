#pragma once

#include <cstdint>

#include "n2c/can_codec.hpp"
#include "n2c/path_tracking.hpp"
#include "n2c/pid.hpp"
#include "n2c/rng.hpp"
#include "n2c/vehicle_sim.hpp"

namespace n2c::sim {

// The scripted stand-in for the paper's human driver: pure pursuit for the
// lateral goal, a speed PID for the longitudinal goal, a first-order
// low-pass on every actuation channel for human-like smoothness, and small
// correlated (Ornstein-Uhlenbeck) noise for human-like variability.
struct ExpertConfig {
    track::PurePursuitConfig pursuit{};
    pid::PidGains longitudinal{0.8, 0.25, 0.0, 0.6, -1.0, 1.0};
    pid::PidGains lateral{3.0, 0.0, 0.15, 0.0, -1.0, 1.0};
    double lpf_tau = 0.3;      // s
    double noise_sigma = 0.02; // stationary OU std-dev per channel
    double noise_tau = 0.5;    // s, OU relaxation time
    double track_width = 1.5;  // m, for synthesized per-wheel speeds
};

// The actuation half of the expert: maps (commanded speed, commanded
// steering, measured speed, measured steering) to a pedal/torque triple.
// Carries PID, low-pass, and noise state across steps. With noise disabled
// this is the deterministic reference policy the evaluation module replays
// on logged command streams.
class ExpertPolicy {
public:
    ExpertPolicy(const ExpertConfig& cfg, bool noise_enabled, std::uint64_t noise_seed);

    ActuatorCommand step(double cmd_speed, double cmd_steering, double meas_speed,
                         double meas_steering, double dt);

private:
    ExpertConfig cfg_;
    bool noise_enabled_;
    Rng rng_;
    pid::PidState lon_state_{};
    pid::PidState lat_state_{};
    double lpf_[3] = {0.0, 0.0, 0.0};
    double ou_[3] = {0.0, 0.0, 0.0};
};

struct ExpertStep {
    ActuatorCommand cmd;
    can::DriveRecord record;
    track::TrackingCommand tracking;
    double cmd_steering = 0.0;
};

// Full scripted driver: tracker + policy + DriveRecord assembly.
class ExpertDriver {
public:
    ExpertDriver(const Route& route, const VehicleParams& params, const ExpertConfig& cfg,
                 std::uint64_t noise_seed, bool noise_enabled = true);

    ExpertStep step(const VehicleState& state, double t, double dt);

private:
    const Route& route_;
    VehicleParams params_;
    ExpertConfig cfg_;
    ExpertPolicy policy_;
    std::optional<std::size_t> hint_;
};

}  // namespace n2c::sim

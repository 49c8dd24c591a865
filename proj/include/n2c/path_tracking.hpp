#pragma once

#include <optional>
#include <vector>

#include "n2c/errors.hpp"
#include "n2c/vehicle_sim.hpp"

namespace n2c::track {

struct OffRoute : Error {
    using Error::Error;
};
struct DegenerateRoute : Error {
    using Error::Error;
};
struct NonFiniteCost : Error {
    using Error::Error;
};

// (v, omega) pair handed from the path follower to the controller.
struct TrackingCommand {
    double v = 0.0;      // m/s, >= 0
    double omega = 0.0;  // rad/s
};

struct PurePursuitConfig {
    double lookahead = 4.0;          // m
    bool speed_scaled = false;       // L_d = max(2, 0.8 v) when set
    double off_route_factor = 10.0;  // error beyond factor * L_d from the path

    void validate() const {
        if (!(lookahead > 0.0)) throw Error("PurePursuitConfig: lookahead must be > 0");
    }
};

struct MpcConfig {
    int horizon = 10;        // steps, >= 2
    double dt = 0.1;         // s
    double q_xy = 1.0;       // position error weight
    double q_yaw = 0.5;      // heading error weight
    double r_omega = 0.05;   // turn-rate effort weight
    double r_dv = 0.2;       // speed-deviation weight
    int iterations = 40;     // projected-gradient iterations
    double step_size = 0.5;  // initial gradient step, adapted by backtracking
    double v_max = 15.0;     // m/s projection bound
    double omega_max = 2.0;  // rad/s projection bound

    void validate() const {
        if (horizon < 2) throw Error("MpcConfig: horizon must be >= 2");
        if (!(dt > 0.0)) throw Error("MpcConfig: dt must be > 0");
        if (q_xy < 0.0 || q_yaw < 0.0 || r_omega < 0.0 || r_dv < 0.0)
            throw Error("MpcConfig: weights must be non-negative");
        if (q_xy == 0.0 && q_yaw == 0.0) throw Error("MpcConfig: need a positive state weight");
        if (iterations < 1) throw Error("MpcConfig: iterations must be >= 1");
        if (!(step_size > 0.0)) throw Error("MpcConfig: step_size must be > 0");
    }
};

// Index of the route waypoint nearest to (x, y). `hint` lets a stepped
// caller resume the linear scan near the previous match.
std::size_t nearest_waypoint(const sim::Route& route, double x, double y,
                             std::optional<std::size_t> hint = std::nullopt);

// Classic geometric tracker: aims at the first waypoint at arc distance
// >= L_d past the nearest point, curvature kappa = 2 sin(alpha) / L_d,
// v = that waypoint's target speed, omega = v * kappa.
TrackingCommand pure_pursuit(const sim::VehicleState& state, const sim::Route& route,
                             const PurePursuitConfig& cfg,
                             std::optional<std::size_t> hint = std::nullopt);

// Receding-horizon follower over the unicycle model, solved by projected
// gradient descent with analytic adjoint gradients and a backtracking line
// search (cost is non-increasing per iteration). Returns the first command
// of the optimized sequence.
TrackingCommand mpc_follow(const sim::VehicleState& state, const sim::Route& route,
                           const MpcConfig& cfg, std::optional<std::size_t> hint = std::nullopt);

// delta = atan(wheelbase * omega / max(v, 0.5 m/s)). The floor keeps the
// conversion total at standstill; clamping to max_steer is the caller's job.
double omega_to_steering(const TrackingCommand& cmd, double wheelbase);

// --- exposed for the brute-force oracle tests --------------------------------
struct MpcReference {
    std::vector<double> x, y, yaw, v;  // horizon samples 1..N
};

MpcReference mpc_reference(const sim::VehicleState& state, const sim::Route& route,
                           const MpcConfig& cfg, std::optional<std::size_t> hint = std::nullopt);

// Rollout cost of a piecewise-constant (v, omega) sequence from `state`.
double mpc_cost(const sim::VehicleState& state, const MpcReference& ref,
                const std::vector<double>& v_seq, const std::vector<double>& omega_seq,
                const MpcConfig& cfg);

void mpc_cost_gradient(const sim::VehicleState& state, const MpcReference& ref,
                       const std::vector<double>& v_seq, const std::vector<double>& omega_seq,
                       const MpcConfig& cfg, std::vector<double>& dv, std::vector<double>& domega);

}  // namespace n2c::track

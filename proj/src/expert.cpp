#include "n2c/expert.hpp"

#include <algorithm>
#include <cmath>

namespace n2c::sim {

ExpertPolicy::ExpertPolicy(const ExpertConfig& cfg, bool noise_enabled, std::uint64_t noise_seed)
    : cfg_(cfg), noise_enabled_(noise_enabled), rng_(noise_seed) {}

ActuatorCommand ExpertPolicy::step(double cmd_speed, double cmd_steering, double meas_speed,
                                   double meas_steering, double dt) {
    auto [th_raw, br_raw, lon_next] = pid::longitudinal_pid(
        std::max(0.0, cmd_speed), std::max(0.0, meas_speed), cfg_.longitudinal, {0.0}, lon_state_, dt);
    lon_state_ = lon_next;
    auto [tq_raw, lat_next] = pid::lateral_pid(cmd_steering, meas_steering, cfg_.lateral, lat_state_, dt);
    lat_state_ = lat_next;

    const double alpha = std::min(1.0, dt / cfg_.lpf_tau);
    const double raw[3] = {th_raw, br_raw, tq_raw};
    double out[3];
    for (int i = 0; i < 3; ++i) {
        lpf_[i] += alpha * (raw[i] - lpf_[i]);
        out[i] = lpf_[i];
    }
    if (noise_enabled_ && cfg_.noise_sigma > 0.0) {
        const double k = dt / cfg_.noise_tau;
        const double diffusion = cfg_.noise_sigma * std::sqrt(2.0 * k);
        for (int i = 0; i < 3; ++i) {
            ou_[i] += -ou_[i] * k + diffusion * rng_.normal();
            out[i] += ou_[i];
        }
    }
    return ActuatorCommand(out[0], out[1], out[2]);
}

ExpertDriver::ExpertDriver(const Route& route, const VehicleParams& params, const ExpertConfig& cfg,
                           std::uint64_t noise_seed, bool noise_enabled)
    : route_(route), params_(params), cfg_(cfg), policy_(cfg, noise_enabled, noise_seed) {
    route_.validate();
    params_.validate();
}

ExpertStep ExpertDriver::step(const VehicleState& state, double t, double dt) {
    const std::size_t near = track::nearest_waypoint(route_, state.x, state.y, hint_);
    hint_ = near;
    const auto tracking = track::pure_pursuit(state, route_, cfg_.pursuit, near);
    const double cmd_steering =
        std::clamp(track::omega_to_steering(tracking, params_.wheelbase), -params_.max_steer,
                   params_.max_steer);

    ExpertStep out;
    out.tracking = tracking;
    out.cmd_steering = cmd_steering;
    out.cmd = policy_.step(tracking.v, cmd_steering, state.speed, state.steering, dt);

    // Per-wheel speeds from the yaw-rate kinematics; their mean recovers the
    // body speed exactly.
    const double yaw_rate = state.speed * std::tan(state.steering) / params_.wheelbase;
    const double half_track = 0.5 * cfg_.track_width;
    const double left = std::max(0.0, state.speed - yaw_rate * half_track);
    const double right = std::max(0.0, state.speed + yaw_rate * half_track);

    can::DriveRecord rec;
    rec.t = t;
    rec.steering = state.steering;
    rec.throttle = out.cmd.throttle;
    rec.brake = out.cmd.brake;
    rec.torque = out.cmd.torque;
    rec.wheel_speeds = {left, right, left, right};
    can::average_wheel_speed(rec);
    rec.clamp_ranges();
    out.record = rec;
    return out;
}

}  // namespace n2c::sim

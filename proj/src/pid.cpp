#include "n2c/pid.hpp"

#include <algorithm>
#include <cmath>

namespace n2c::pid {

std::pair<double, PidState> pid_step(const PidGains& gains, PidState state, double error, double dt) {
    gains.validate();
    if (!(dt > 0.0)) throw Error("NonPositiveDt: pid_step requires dt > 0");

    if (gains.ki != 0.0) {
        state.integral += error * dt;
        const double limit = gains.i_clamp / std::abs(gains.ki);
        state.integral = std::clamp(state.integral, -limit, limit);
    }

    double derivative = 0.0;
    if (state.initialized && gains.kd != 0.0) derivative = (error - state.prev_error) / dt;

    double u = gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
    u = std::clamp(u, gains.out_min, gains.out_max);

    state.prev_error = error;
    state.initialized = true;
    return {u, state};
}

std::tuple<double, double, PidState> longitudinal_pid(double cmd_speed, double speed,
                                                      const PidGains& gains,
                                                      const LongitudinalSplit& split,
                                                      PidState state, double dt) {
    split.validate();
    if (cmd_speed < 0.0 || speed < 0.0) throw Error("longitudinal_pid: speeds must be >= 0");
    const double error = cmd_speed - speed;
    if (std::abs(error) < split.deadband) return {0.0, 0.0, state};

    auto [u, next] = pid_step(gains, state, error, dt);
    const double throttle = std::clamp(u, 0.0, 1.0);
    const double brake = std::clamp(-u, 0.0, 1.0);
    return {throttle, brake, next};
}

std::pair<double, PidState> lateral_pid(double cmd_steering, double steering,
                                        const PidGains& gains, PidState state, double dt) {
    if (!std::isfinite(cmd_steering) || !std::isfinite(steering))
        throw Error("lateral_pid: inputs must be finite");
    auto [u, next] = pid_step(gains, state, cmd_steering - steering, dt);
    return {std::clamp(u, -1.0, 1.0), next};
}

}  // namespace n2c::pid

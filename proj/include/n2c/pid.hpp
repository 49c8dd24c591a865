#pragma once

#include <tuple>

#include "n2c/errors.hpp"

namespace n2c::pid {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double i_clamp = 0.0;   // bound on the ki-weighted integral term, output units
    double out_min = -1.0;
    double out_max = 1.0;

    void validate() const {
        if (!(out_min < out_max)) throw Error("PidGains: out_min must be < out_max");
        if (i_clamp < 0.0) throw Error("PidGains: i_clamp must be >= 0");
    }
};

struct PidState {
    double integral = 0.0;    // accumulated error * s, clamped for anti-windup
    double prev_error = 0.0;
    bool initialized = false;
};

struct LongitudinalSplit {
    double deadband = 0.0;  // m/s of speed error inside which neither pedal actuates

    void validate() const {
        if (deadband < 0.0) throw Error("LongitudinalSplit: deadband must be >= 0");
    }
};

// u = kp*e + ki*integral + kd*(e - e_prev)/dt. The integral is clamped so
// its ki-weighted contribution stays within +/- i_clamp; the derivative term
// is zero on the first call. Output clamped to [out_min, out_max].
std::pair<double, PidState> pid_step(const PidGains& gains, PidState state, double error, double dt);

// Speed regulation with a sign-split pedal map: positive control effort goes
// to throttle, negative to brake, never both. Inside the deadband the state
// (including the integral) is frozen.
std::tuple<double, double, PidState> longitudinal_pid(double cmd_speed, double speed,
                                                      const PidGains& gains,
                                                      const LongitudinalSplit& split,
                                                      PidState state, double dt);

// Steering-angle regulation producing normalized torque in [-1, 1].
std::pair<double, PidState> lateral_pid(double cmd_steering, double steering,
                                        const PidGains& gains, PidState state, double dt);

// Gains tuned once against the default plant and frozen here so every
// baseline run is reproducible. Overridable through the experiment config.
inline PidGains default_longitudinal_gains() {
    return {0.5, 0.1, 0.0, 0.5, -1.0, 1.0};
}
inline PidGains default_lateral_gains() {
    return {2.0, 0.0, 0.2, 0.0, -1.0, 1.0};
}
inline LongitudinalSplit default_split() { return {0.05}; }

}  // namespace n2c::pid

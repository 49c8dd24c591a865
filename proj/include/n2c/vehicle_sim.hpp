#pragma once

#include <cstdint>
#include <vector>

#include "n2c/errors.hpp"

namespace n2c::sim {

struct BadGeometry : Error {
    using Error::Error;
};

struct VehicleParams {
    double wheelbase = 2.57;   // m
    double max_steer = 0.6;    // rad
    double max_accel = 3.0;    // m/s^2 at full throttle
    double max_brake = 6.0;    // m/s^2 at full brake
    double steer_rate = 0.8;   // rad/s at full torque
    double drag = 0.12;        // 1/s, speed-proportional decel

    void validate() const;
};

struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;       // rad, wrapped to (-pi, pi]
    double speed = 0.0;     // m/s, >= 0
    double steering = 0.0;  // rad, front-wheel angle
};

// Normalized pedal/torque triple, clamped on construction.
struct ActuatorCommand {
    double throttle = 0.0;  // [0,1]
    double brake = 0.0;     // [0,1]
    double torque = 0.0;    // [-1,1]

    ActuatorCommand() = default;
    ActuatorCommand(double th, double br, double tq);
};

struct Waypoint {
    double x = 0.0;
    double y = 0.0;
    double target_speed = 0.0;  // m/s
};

struct Route {
    std::vector<Waypoint> waypoints;
    bool closed = false;

    void validate() const;
    double arc_length() const;
};

double wrap_angle(double a);

// One explicit-Euler step of the kinematic bicycle with the actuator map
//   accel = throttle*max_accel - brake*max_brake - drag*speed
//   steering rate = torque*steer_rate
// Kinematics (yaw, position) advance with the post-update speed, steering,
// and yaw. dt must lie in (0, 0.1].
VehicleState step(const VehicleState& state, const ActuatorCommand& cmd,
                  const VehicleParams& params, double dt);

enum class RouteKind { kStraight, kCircle, kFigure8, kSplineRandom };

enum class SpeedProfile {
    kConstant,
    kTrapezoid,   // accelerate from rest, cruise, brake to rest (straight routes)
    kSeededVariation,  // smooth per-control-point variation in [0.6, 1] x target
};

struct RouteGenParams {
    double length = 200.0;        // m, straight / spline extent
    double radius = 20.0;         // m, circle / figure8
    double spacing = 1.0;         // m between waypoints, must be in (0, 2]
    double target_speed = 5.0;    // m/s
    SpeedProfile speed_profile = SpeedProfile::kConstant;
    double profile_accel = 1.0;   // m/s^2 ramp used by the trapezoid profile
    int spline_segments = 10;     // control-point count for spline_random
};

Route generate_route(RouteKind kind, const RouteGenParams& params, std::uint64_t rng_seed);

RouteKind route_kind_from_string(const std::string& s);
std::string to_string(RouteKind kind);

}  // namespace n2c::sim

#include "n2c/vehicle_sim.hpp"

#include <algorithm>
#include <cmath>

#include "n2c/rng.hpp"

namespace n2c::sim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void VehicleParams::validate() const {
    if (!(wheelbase > 0.0 && max_steer > 0.0 && max_accel > 0.0 && max_brake > 0.0 &&
          steer_rate > 0.0 && drag > 0.0))
        throw Error("VehicleParams: all parameters must be strictly positive");
}

ActuatorCommand::ActuatorCommand(double th, double br, double tq)
    : throttle(std::clamp(th, 0.0, 1.0)),
      brake(std::clamp(br, 0.0, 1.0)),
      torque(std::clamp(tq, -1.0, 1.0)) {}

double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

VehicleState step(const VehicleState& state, const ActuatorCommand& cmd,
                  const VehicleParams& params, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw Error("NonPositiveDt: step requires dt > 0");
    if (dt > 0.1) throw Error("step: dt must be <= 0.1 s");

    const double accel =
        cmd.throttle * params.max_accel - cmd.brake * params.max_brake - params.drag * state.speed;

    VehicleState next = state;
    next.steering = std::clamp(state.steering + cmd.torque * params.steer_rate * dt,
                               -params.max_steer, params.max_steer);
    next.speed = std::max(0.0, state.speed + accel * dt);
    next.yaw = wrap_angle(state.yaw + next.speed * std::tan(next.steering) / params.wheelbase * dt);
    next.x = state.x + next.speed * std::cos(next.yaw) * dt;
    next.y = state.y + next.speed * std::sin(next.yaw) * dt;
    return next;
}

void Route::validate() const {
    if (waypoints.size() < 2) throw BadGeometry("Route needs at least 2 waypoints");
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double dx = waypoints[i].x - waypoints[i - 1].x;
        const double dy = waypoints[i].y - waypoints[i - 1].y;
        if (dx * dx + dy * dy < 1e-18) throw BadGeometry("Route has coincident waypoints");
    }
    for (const auto& w : waypoints)
        if (w.target_speed < 0.0) throw BadGeometry("Route target speeds must be >= 0");
}

double Route::arc_length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        total += std::hypot(waypoints[i].x - waypoints[i - 1].x, waypoints[i].y - waypoints[i - 1].y);
    if (closed && waypoints.size() > 1)
        total += std::hypot(waypoints.front().x - waypoints.back().x,
                            waypoints.front().y - waypoints.back().y);
    return total;
}

namespace {

void check_params(const RouteGenParams& p) {
    if (!(p.spacing > 0.0 && p.spacing <= 2.0))
        throw BadGeometry("BadGeometry: spacing must be in (0, 2] m");
    if (!(p.length > 0.0)) throw BadGeometry("BadGeometry: length must be > 0");
    if (!(p.radius > 0.0)) throw BadGeometry("BadGeometry: radius must be > 0");
    if (!(p.target_speed >= 0.0)) throw BadGeometry("BadGeometry: target_speed must be >= 0");
    if (p.spline_segments < 2) throw BadGeometry("BadGeometry: spline_segments must be >= 2");
}

Route make_straight(const RouteGenParams& p) {
    Route route;
    const int n = static_cast<int>(std::ceil(p.length / p.spacing - 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double d = std::min(static_cast<double>(i) * p.spacing, p.length);
        double v = p.target_speed;
        if (p.speed_profile == SpeedProfile::kTrapezoid) {
            const double from_start = std::sqrt(2.0 * p.profile_accel * d);
            const double to_end = std::sqrt(2.0 * p.profile_accel * (p.length - d));
            v = std::min({p.target_speed, from_start, to_end});
        }
        route.waypoints.push_back({d, 0.0, v});
    }
    route.closed = false;
    return route;
}

Route make_circle(const RouteGenParams& p) {
    Route route;
    const int n = std::max(8, static_cast<int>(std::round(2.0 * kPi * p.radius / p.spacing)));
    for (int i = 0; i < n; ++i) {
        // Center (0, R): start at the origin heading +x, counter-clockwise.
        const double phi = -kPi / 2.0 + 2.0 * kPi * static_cast<double>(i) / n;
        route.waypoints.push_back(
            {p.radius * std::cos(phi), p.radius + p.radius * std::sin(phi), p.target_speed});
    }
    route.closed = true;
    return route;
}

Route make_figure8(const RouteGenParams& p) {
    Route route;
    const int n = std::max(8, static_cast<int>(std::round(2.0 * kPi * p.radius / p.spacing)));
    for (int i = 0; i < n; ++i) {  // top loop, counter-clockwise
        const double phi = -kPi / 2.0 + 2.0 * kPi * static_cast<double>(i) / n;
        route.waypoints.push_back(
            {p.radius * std::cos(phi), p.radius + p.radius * std::sin(phi), p.target_speed});
    }
    for (int i = 0; i < n; ++i) {  // bottom loop, clockwise
        const double psi = kPi / 2.0 - 2.0 * kPi * static_cast<double>(i) / n;
        route.waypoints.push_back(
            {p.radius * std::cos(psi), -p.radius + p.radius * std::sin(psi), p.target_speed});
    }
    // Drop near-duplicates at the loop junction.
    Route cleaned;
    cleaned.closed = true;
    for (const auto& w : route.waypoints) {
        if (!cleaned.waypoints.empty()) {
            const auto& prev = cleaned.waypoints.back();
            if (std::hypot(w.x - prev.x, w.y - prev.y) < 1e-6) continue;
        }
        cleaned.waypoints.push_back(w);
    }
    return cleaned;
}

struct ControlPoint {
    double x, y, speed_factor;
};

// Catmull-Rom interpolation between p1 and p2 at parameter u in [0,1].
double catmull_rom(double p0, double p1, double p2, double p3, double u) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u3);
}

Route make_spline_random(const RouteGenParams& p, std::uint64_t seed) {
    Rng rng(seed_for(seed, SeedDomain::kRoute, 0));

    // Random gentle polyline: bounded heading change per segment keeps the
    // turning radius comfortably above the vehicle's minimum.
    std::vector<ControlPoint> ctrl;
    double heading = 0.0, x = 0.0, y = 0.0;
    ctrl.push_back({x, y, 1.0});
    for (int i = 0; i < p.spline_segments; ++i) {
        heading += rng.uniform(-0.55, 0.55);
        const double seg = rng.uniform(18.0, 32.0);
        x += seg * std::cos(heading);
        y += seg * std::sin(heading);
        const double factor =
            p.speed_profile == SpeedProfile::kSeededVariation ? rng.uniform(0.6, 1.0) : 1.0;
        ctrl.push_back({x, y, factor});
    }

    Route route;
    route.closed = false;
    double carried = 0.0;
    double px = ctrl.front().x, py = ctrl.front().y;
    route.waypoints.push_back({px, py, p.target_speed * ctrl.front().speed_factor});
    const int n = static_cast<int>(ctrl.size());
    for (int seg = 0; seg + 1 < n; ++seg) {
        const ControlPoint& a = ctrl[std::max(0, seg - 1)];
        const ControlPoint& b = ctrl[seg];
        const ControlPoint& c = ctrl[seg + 1];
        const ControlPoint& d = ctrl[std::min(n - 1, seg + 2)];
        const int fine = 200;
        for (int k = 1; k <= fine; ++k) {
            const double u = static_cast<double>(k) / fine;
            const double qx = catmull_rom(a.x, b.x, c.x, d.x, u);
            const double qy = catmull_rom(a.y, b.y, c.y, d.y, u);
            double step_len = std::hypot(qx - px, qy - py);
            // Emit waypoints at exact arc spacing, interpolating inside the
            // fine step so the spacing invariant holds to rounding error.
            while (carried + step_len >= p.spacing && step_len > 0.0) {
                const double need = p.spacing - carried;
                const double frac = need / step_len;
                const double wx = px + (qx - px) * frac;
                const double wy = py + (qy - py) * frac;
                const double factor = b.speed_factor + (c.speed_factor - b.speed_factor) * u;
                route.waypoints.push_back({wx, wy, p.target_speed * factor});
                px = wx;
                py = wy;
                step_len -= need;
                carried = 0.0;
            }
            carried += step_len;
            px = qx;
            py = qy;
        }
    }
    return route;
}

}  // namespace

Route generate_route(RouteKind kind, const RouteGenParams& params, std::uint64_t rng_seed) {
    check_params(params);
    Route route;
    switch (kind) {
        case RouteKind::kStraight: route = make_straight(params); break;
        case RouteKind::kCircle: route = make_circle(params); break;
        case RouteKind::kFigure8: route = make_figure8(params); break;
        case RouteKind::kSplineRandom: route = make_spline_random(params, rng_seed); break;
    }
    route.validate();
    return route;
}

RouteKind route_kind_from_string(const std::string& s) {
    if (s == "straight") return RouteKind::kStraight;
    if (s == "circle") return RouteKind::kCircle;
    if (s == "figure8") return RouteKind::kFigure8;
    if (s == "spline_random") return RouteKind::kSplineRandom;
    throw Error("unknown route kind: " + s);
}

std::string to_string(RouteKind kind) {
    switch (kind) {
        case RouteKind::kStraight: return "straight";
        case RouteKind::kCircle: return "circle";
        case RouteKind::kFigure8: return "figure8";
        case RouteKind::kSplineRandom: return "spline_random";
    }
    return "?";
}

}  // namespace n2c::sim

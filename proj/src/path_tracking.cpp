#include "n2c/path_tracking.hpp"

#include <algorithm>
#include <cmath>

namespace n2c::track {

namespace {

void validate_route(const sim::Route& route) {
    try {
        route.validate();
    } catch (const Error& e) {
        throw DegenerateRoute(std::string("DegenerateRoute: ") + e.what());
    }
}

double segment_length(const sim::Route& route, std::size_t i) {
    const auto& a = route.waypoints[i];
    const auto& b = route.waypoints[(i + 1) % route.waypoints.size()];
    return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace

std::size_t nearest_waypoint(const sim::Route& route, double x, double y,
                             std::optional<std::size_t> hint) {
    const auto& wps = route.waypoints;
    const std::size_t n = wps.size();

    auto dist2 = [&](std::size_t i) {
        const double dx = wps[i].x - x;
        const double dy = wps[i].y - y;
        return dx * dx + dy * dy;
    };

    std::size_t best = 0;
    double best_d = dist2(0);

    if (hint && *hint < n) {
        // Windowed scan around the previous match. Self-crossing routes
        // (figure-8) rely on this to keep progress monotone instead of
        // snapping to the other branch at the intersection.
        double avg_spacing = route.arc_length() / static_cast<double>(n);
        avg_spacing = std::max(avg_spacing, 1e-6);
        const auto back = static_cast<std::size_t>(std::ceil(5.0 / avg_spacing));
        const auto fwd = static_cast<std::size_t>(std::ceil(30.0 / avg_spacing));
        best = *hint;
        best_d = dist2(best);
        for (std::size_t off = 0; off <= back + fwd; ++off) {
            std::ptrdiff_t raw = static_cast<std::ptrdiff_t>(*hint) -
                                 static_cast<std::ptrdiff_t>(back) + static_cast<std::ptrdiff_t>(off);
            std::size_t idx;
            if (route.closed) {
                raw %= static_cast<std::ptrdiff_t>(n);
                if (raw < 0) raw += static_cast<std::ptrdiff_t>(n);
                idx = static_cast<std::size_t>(raw);
            } else {
                if (raw < 0 || raw >= static_cast<std::ptrdiff_t>(n)) continue;
                idx = static_cast<std::size_t>(raw);
            }
            const double d = dist2(idx);
            if (d < best_d) {
                best_d = d;
                best = idx;
            }
        }
        return best;
    }

    for (std::size_t i = 1; i < n; ++i) {
        const double d = dist2(i);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

TrackingCommand pure_pursuit(const sim::VehicleState& state, const sim::Route& route,
                             const PurePursuitConfig& cfg, std::optional<std::size_t> hint) {
    validate_route(route);
    cfg.validate();
    const double lookahead = cfg.speed_scaled ? std::max(2.0, 0.8 * state.speed) : cfg.lookahead;

    const std::size_t nearest = nearest_waypoint(route, state.x, state.y, hint);
    const auto& np = route.waypoints[nearest];
    const double off = std::hypot(np.x - state.x, np.y - state.y);
    if (off > cfg.off_route_factor * lookahead)
        throw OffRoute("OffRoute: " + std::to_string(off) + " m from route");

    // First waypoint at arc distance >= L_d past the nearest point.
    const std::size_t n = route.waypoints.size();
    std::size_t target = nearest;
    double acc = 0.0;
    for (std::size_t steps = 0; steps < n; ++steps) {
        if (!route.closed && target + 1 >= n) break;
        acc += segment_length(route, target);
        target = (target + 1) % n;
        if (acc >= lookahead) break;
    }

    const auto& tp = route.waypoints[target];
    const double dx = tp.x - state.x;
    const double dy = tp.y - state.y;
    const double xf = std::cos(state.yaw) * dx + std::sin(state.yaw) * dy;
    const double yf = -std::sin(state.yaw) * dx + std::cos(state.yaw) * dy;
    const double alpha = std::atan2(yf, xf);
    const double kappa = 2.0 * std::sin(alpha) / lookahead;

    TrackingCommand cmd;
    cmd.v = tp.target_speed;
    cmd.omega = cmd.v * kappa;
    return cmd;
}

MpcReference mpc_reference(const sim::VehicleState& state, const sim::Route& route,
                           const MpcConfig& cfg, std::optional<std::size_t> hint) {
    validate_route(route);
    cfg.validate();
    const auto& wps = route.waypoints;
    const std::size_t n = wps.size();
    const std::size_t nearest = nearest_waypoint(route, state.x, state.y, hint);

    // March along the route at the current speed, one sample per horizon step.
    const double ds = std::max(state.speed, 0.5) * cfg.dt;
    MpcReference ref;
    std::size_t seg = nearest;
    double into = 0.0;  // arc distance consumed inside the current segment
    for (int k = 0; k < cfg.horizon; ++k) {
        double remaining = ds;
        while (true) {
            if (!route.closed && seg + 1 >= n) break;  // hold at the final waypoint
            const double len = segment_length(route, seg);
            if (into + remaining < len) {
                into += remaining;
                break;
            }
            remaining -= len - into;
            into = 0.0;
            seg = (seg + 1) % n;
        }
        const auto& a = wps[seg];
        const auto& b = wps[(seg + 1) % n];
        const double len = std::max(segment_length(route, seg), 1e-9);
        const bool at_end = !route.closed && seg + 1 >= n;
        const double u = at_end ? 0.0 : into / len;
        ref.x.push_back(a.x + (b.x - a.x) * u);
        ref.y.push_back(a.y + (b.y - a.y) * u);
        ref.yaw.push_back(at_end ? std::atan2(a.y - wps[seg - 1].y, a.x - wps[seg - 1].x)
                                 : std::atan2(b.y - a.y, b.x - a.x));
        ref.v.push_back(at_end ? a.target_speed : a.target_speed + (b.target_speed - a.target_speed) * u);
    }
    return ref;
}

double mpc_cost(const sim::VehicleState& state, const MpcReference& ref,
                const std::vector<double>& v_seq, const std::vector<double>& omega_seq,
                const MpcConfig& cfg) {
    const int N = cfg.horizon;
    double x = state.x, y = state.y, psi = state.yaw;
    double cost = 0.0;
    for (int k = 0; k < N; ++k) {
        psi += omega_seq[static_cast<std::size_t>(k)] * cfg.dt;
        x += v_seq[static_cast<std::size_t>(k)] * std::cos(psi) * cfg.dt;
        y += v_seq[static_cast<std::size_t>(k)] * std::sin(psi) * cfg.dt;
        const double ex = x - ref.x[static_cast<std::size_t>(k)];
        const double ey = y - ref.y[static_cast<std::size_t>(k)];
        const double epsi = sim::wrap_angle(psi - ref.yaw[static_cast<std::size_t>(k)]);
        const double ev = v_seq[static_cast<std::size_t>(k)] - ref.v[static_cast<std::size_t>(k)];
        cost += cfg.q_xy * (ex * ex + ey * ey) + cfg.q_yaw * epsi * epsi;
        cost += cfg.r_omega * omega_seq[static_cast<std::size_t>(k)] * omega_seq[static_cast<std::size_t>(k)] +
                cfg.r_dv * ev * ev;
    }
    return cost;
}

void mpc_cost_gradient(const sim::VehicleState& state, const MpcReference& ref,
                       const std::vector<double>& v_seq, const std::vector<double>& omega_seq,
                       const MpcConfig& cfg, std::vector<double>& dv, std::vector<double>& domega) {
    const auto N = static_cast<std::size_t>(cfg.horizon);
    std::vector<double> xs(N + 1), ys(N + 1), psis(N + 1);
    xs[0] = state.x;
    ys[0] = state.y;
    psis[0] = state.yaw;
    for (std::size_t k = 0; k < N; ++k) {
        psis[k + 1] = psis[k] + omega_seq[k] * cfg.dt;
        xs[k + 1] = xs[k] + v_seq[k] * std::cos(psis[k + 1]) * cfg.dt;
        ys[k + 1] = ys[k] + v_seq[k] * std::sin(psis[k + 1]) * cfg.dt;
    }

    dv.assign(N, 0.0);
    domega.assign(N, 0.0);
    double lx = 0.0, ly = 0.0, lpsi = 0.0;  // adjoint of state k during the sweep
    for (std::size_t k = N; k >= 1; --k) {
        lx += 2.0 * cfg.q_xy * (xs[k] - ref.x[k - 1]);
        ly += 2.0 * cfg.q_xy * (ys[k] - ref.y[k - 1]);
        lpsi += 2.0 * cfg.q_yaw * sim::wrap_angle(psis[k] - ref.yaw[k - 1]);

        const double v = v_seq[k - 1];
        const double c = std::cos(psis[k]);
        const double s = std::sin(psis[k]);
        // Total derivative through psi_k, including its effect on x_k, y_k.
        const double gpsi = lpsi + (-lx * v * s + ly * v * c) * cfg.dt;

        dv[k - 1] = (lx * c + ly * s) * cfg.dt + 2.0 * cfg.r_dv * (v - ref.v[k - 1]);
        domega[k - 1] = gpsi * cfg.dt + 2.0 * cfg.r_omega * omega_seq[k - 1];

        // hand the adjoint to state k-1
        lpsi = gpsi;
        // lx, ly carry over unchanged
    }
}

TrackingCommand mpc_follow(const sim::VehicleState& state, const sim::Route& route,
                           const MpcConfig& cfg, std::optional<std::size_t> hint) {
    cfg.validate();
    const MpcReference ref = mpc_reference(state, route, cfg, hint);
    const auto N = static_cast<std::size_t>(cfg.horizon);

    std::vector<double> v(N), omega(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) v[k] = std::clamp(ref.v[k], 0.0, cfg.v_max);

    auto project = [&](std::vector<double>& vs, std::vector<double>& os) {
        for (std::size_t k = 0; k < N; ++k) {
            vs[k] = std::clamp(vs[k], 0.0, cfg.v_max);
            os[k] = std::clamp(os[k], -cfg.omega_max, cfg.omega_max);
        }
    };
    project(v, omega);

    double cost = mpc_cost(state, ref, v, omega, cfg);
    if (!std::isfinite(cost)) throw NonFiniteCost("NonFiniteCost: initial rollout diverged");

    std::vector<double> dv, domega, v_try(N), omega_try(N);
    double step = cfg.step_size;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        mpc_cost_gradient(state, ref, v, omega, cfg, dv, domega);
        bool accepted = false;
        double s = step;
        for (int bt = 0; bt < 30; ++bt) {
            for (std::size_t k = 0; k < N; ++k) {
                v_try[k] = v[k] - s * dv[k];
                omega_try[k] = omega[k] - s * domega[k];
            }
            project(v_try, omega_try);
            const double cost_try = mpc_cost(state, ref, v_try, omega_try, cfg);
            if (std::isfinite(cost_try) && cost_try <= cost) {
                v.swap(v_try);
                omega.swap(omega_try);
                cost = cost_try;
                step = std::min(s * 2.0, cfg.step_size * 1024.0);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;  // stationary within line-search resolution
    }
    if (!std::isfinite(cost)) throw NonFiniteCost("NonFiniteCost: optimization diverged");

    return {std::max(0.0, v[0]), omega[0]};
}

double omega_to_steering(const TrackingCommand& cmd, double wheelbase) {
    if (!(wheelbase > 0.0)) throw Error("omega_to_steering: wheelbase must be > 0");
    constexpr double kSpeedFloor = 0.5;
    return std::atan(wheelbase * cmd.omega / std::max(cmd.v, kSpeedFloor));
}

}  // namespace n2c::track

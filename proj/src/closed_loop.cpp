#include "n2c/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "n2c/io.hpp"

namespace n2c::ctrl {

TrackerKind tracker_kind_from_string(const std::string& s) {
    if (s == "pp" || s == "pure_pursuit") return TrackerKind::kPurePursuit;
    if (s == "mpc") return TrackerKind::kMpc;
    throw Error("unknown tracker kind: " + s);
}

ControllerKind controller_kind_from_string(const std::string& s) {
    if (s == "n2c") return ControllerKind::kN2c;
    if (s == "pid") return ControllerKind::kPid;
    if (s == "expert") return ControllerKind::kExpert;
    throw Error("unknown controller kind: " + s);
}

std::string to_string(TrackerKind kind) {
    return kind == TrackerKind::kPurePursuit ? "pp" : "mpc";
}

std::string to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::kN2c: return "n2c";
        case ControllerKind::kPid: return "pid";
        case ControllerKind::kExpert: return "expert";
    }
    return "?";
}

namespace {

sim::VehicleState initial_state(const sim::Route& route) {
    sim::VehicleState s;
    const auto& a = route.waypoints[0];
    const auto& b = route.waypoints[1];
    s.x = a.x;
    s.y = a.y;
    s.yaw = std::atan2(b.y - a.y, b.x - a.x);
    return s;
}

}  // namespace

EpisodeLog closed_loop_run(const sim::Route& route, const ClosedLoopConfig& cfg) {
    route.validate();
    cfg.vehicle.validate();
    if (!(cfg.dt > 0.0 && cfg.dt <= 0.1)) throw Error("closed_loop_run: dt must be in (0, 0.1]");
    if (cfg.duration < 0.0) throw Error("closed_loop_run: duration must be >= 0");
    if (cfg.controller == ControllerKind::kN2c && cfg.checkpoint == nullptr)
        throw DataError("MissingArtifacts: N2C controller without checkpoint");

    EpisodeLog log;
    log.source = to_string(cfg.controller);

    const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
    if (steps == 0) return log;

    sim::VehicleState state = initial_state(route);
    if (cfg.start_at_route_speed) state.speed = route.waypoints.front().target_speed;

    sim::ExpertDriver expert(route, cfg.vehicle, cfg.expert,
                             seed_for(cfg.noise_seed, SeedDomain::kExpert, 0), cfg.expert_noise);
    pid::PidState lon_state{}, lat_state{};
    std::deque<std::array<double, 2>> history;
    std::optional<std::size_t> hint;

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;

        EpisodeRow row;
        row.t = t;
        row.x = state.x;
        row.y = state.y;
        row.yaw = state.yaw;
        row.speed = state.speed;
        row.steering = state.steering;

        sim::ActuatorCommand cmd;
        try {
            if (cfg.controller == ControllerKind::kExpert) {
                const sim::ExpertStep es = expert.step(state, t, cfg.dt);
                cmd = es.cmd;
                row.cmd_v = es.tracking.v;
                row.cmd_omega = es.tracking.omega;
                row.cmd_steering = es.cmd_steering;
                log.records.push_back(es.record);
            } else {
                const std::size_t near = track::nearest_waypoint(route, state.x, state.y, hint);
                hint = near;
                const track::TrackingCommand tracking =
                    cfg.tracker == TrackerKind::kPurePursuit
                        ? track::pure_pursuit(state, route, cfg.pursuit, near)
                        : track::mpc_follow(state, route, cfg.mpc, near);
                const double cmd_steering =
                    std::clamp(track::omega_to_steering(tracking, cfg.vehicle.wheelbase),
                               -cfg.vehicle.max_steer, cfg.vehicle.max_steer);
                row.cmd_v = tracking.v;
                row.cmd_omega = tracking.omega;
                row.cmd_steering = cmd_steering;

                if (cfg.controller == ControllerKind::kPid) {
                    auto [th, br, lon_next] = pid::longitudinal_pid(
                        tracking.v, state.speed, cfg.pid_longitudinal, cfg.pid_split, lon_state, cfg.dt);
                    lon_state = lon_next;
                    auto [tq, lat_next] =
                        pid::lateral_pid(cmd_steering, state.steering, cfg.pid_lateral, lat_state, cfg.dt);
                    lat_state = lat_next;
                    cmd = sim::ActuatorCommand(th, br, tq);
                } else {
                    const std::array<double, 2> input =
                        cfg.input_source == InputSource::kCommands
                            ? std::array<double, 2>{tracking.v, cmd_steering}
                            : std::array<double, 2>{state.speed, state.steering};
                    history.push_back(input);
                    while (history.size() > static_cast<std::size_t>(cfg.checkpoint->window))
                        history.pop_front();
                    const auto triple =
                        predict(*cfg.checkpoint, {history.begin(), history.end()});
                    cmd = sim::ActuatorCommand(triple[0], triple[1], triple[2]);
                }
            }
        } catch (const track::OffRoute&) {
            log.off_route = true;
            log.off_route_t = t;
            break;
        }

        row.throttle = cmd.throttle;
        row.brake = cmd.brake;
        row.torque = cmd.torque;
        log.rows.push_back(row);

        state = sim::step(state, cmd, cfg.vehicle, cfg.dt);
    }
    return log;
}

std::string episode_to_csv(const EpisodeLog& log) {
    std::string out =
        "t,x,y,yaw,speed,steering,cmd_v,cmd_omega,cmd_steering,throttle,brake,torque,source\n";
    for (const auto& r : log.rows) {
        for (double v : {r.t, r.x, r.y, r.yaw, r.speed, r.steering, r.cmd_v, r.cmd_omega,
                         r.cmd_steering, r.throttle, r.brake, r.torque}) {
            out += fmt_double(v);
            out += ',';
        }
        out += log.source;
        out += '\n';
    }
    return out;
}

EpisodeLog episode_from_csv(const std::string& content) {
    EpisodeLog log;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line.rfind("t,x,y,yaw", 0) != 0) throw Error("episode CSV: unexpected header");
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 13)
            throw Error("episode CSV line " + std::to_string(line_no) + ": expected 13 fields");
        EpisodeRow r;
        double* slots[12] = {&r.t,     &r.x,         &r.y,        &r.yaw,      &r.speed,
                             &r.steering, &r.cmd_v,  &r.cmd_omega, &r.cmd_steering, &r.throttle,
                             &r.brake, &r.torque};
        for (int i = 0; i < 12; ++i) {
            const auto v = parse_double(fields[static_cast<std::size_t>(i)]);
            if (!v) throw Error("episode CSV line " + std::to_string(line_no) + ": bad number");
            *slots[i] = *v;
        }
        log.source = std::string(fields[12]);
        log.rows.push_back(r);
    }
    return log;
}

std::vector<std::array<double, 3>> expert_reference_triples(const EpisodeLog& log,
                                                            const sim::ExpertConfig& expert,
                                                            double dt) {
    sim::ExpertPolicy reference(expert, /*noise_enabled=*/false, 0);
    std::vector<std::array<double, 3>> out;
    out.reserve(log.rows.size());
    for (const auto& row : log.rows) {
        const sim::ActuatorCommand cmd =
            reference.step(row.cmd_v, row.cmd_steering, row.speed, row.steering, dt);
        out.push_back({cmd.throttle, cmd.brake, cmd.torque});
    }
    return out;
}

}  // namespace n2c::ctrl

#include "n2c/config.hpp"

#include "n2c/io.hpp"
#include "json.hpp"

namespace n2c::cli {

using nlohmann::json;

sim::Route RouteSpec::build(std::uint64_t root_seed) const {
    return sim::generate_route(kind, params, seed_for(root_seed, SeedDomain::kRoute, seed_offset));
}

void ExperimentConfig::validate() const {
    if (!(rate_hz > 0.0)) throw Error("config: rate_hz must be > 0");
    if (!(dt > 0.0 && dt <= 0.1)) throw Error("config: dt must be in (0, 0.1]");
    vehicle.validate();
    pursuit.validate();
    mpc.validate();
    pid_longitudinal.validate();
    pid_lateral.validate();
    pid_split.validate();
    if (window < 1) throw Error("config: window must be >= 1");
    if (stride < 1) throw Error("config: stride must be >= 1");
    architecture.validate();
    training.validate();
    if (eval_stride < 1) throw Error("config: eval_stride must be >= 1");
    if (warmup_steps < 0) throw Error("config: warmup_steps must be >= 0");
    if (episode_duration < 0.0) throw Error("config: episode_duration must be >= 0");
    noise.validate();
    for (const auto& r : collect_routes)
        if (r.duration < 0.0) throw Error("config: route duration must be >= 0");
    for (const auto& p : pairings)
        if (p != "human" && p != "pp_nn" && p != "pp_pid" && p != "mpc_nn" && p != "mpc_pid")
            throw Error("config: unknown pairing '" + p + "'");
}

namespace {

json gains_to_json(const pid::PidGains& g) {
    return {{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd}, {"i_clamp", g.i_clamp},
            {"out_min", g.out_min}, {"out_max", g.out_max}};
}

pid::PidGains gains_from_json(const json& j, const pid::PidGains& base) {
    pid::PidGains g = base;
    g.kp = j.value("kp", g.kp);
    g.ki = j.value("ki", g.ki);
    g.kd = j.value("kd", g.kd);
    g.i_clamp = j.value("i_clamp", g.i_clamp);
    g.out_min = j.value("out_min", g.out_min);
    g.out_max = j.value("out_max", g.out_max);
    return g;
}

std::string speed_profile_name(sim::SpeedProfile p) {
    switch (p) {
        case sim::SpeedProfile::kConstant: return "constant";
        case sim::SpeedProfile::kTrapezoid: return "trapezoid";
        case sim::SpeedProfile::kSeededVariation: return "seeded_variation";
    }
    return "?";
}

sim::SpeedProfile speed_profile_from(const std::string& s) {
    if (s == "constant") return sim::SpeedProfile::kConstant;
    if (s == "trapezoid") return sim::SpeedProfile::kTrapezoid;
    if (s == "seeded_variation") return sim::SpeedProfile::kSeededVariation;
    throw Error("unknown speed profile: " + s);
}

json route_to_json(const RouteSpec& r) {
    return {{"kind", sim::to_string(r.kind)},
            {"length", r.params.length},
            {"radius", r.params.radius},
            {"spacing", r.params.spacing},
            {"target_speed", r.params.target_speed},
            {"speed_profile", speed_profile_name(r.params.speed_profile)},
            {"profile_accel", r.params.profile_accel},
            {"spline_segments", r.params.spline_segments},
            {"duration", r.duration},
            {"seed_offset", r.seed_offset}};
}

RouteSpec route_from_json(const json& j) {
    RouteSpec r;
    r.kind = sim::route_kind_from_string(j.at("kind").get<std::string>());
    r.params.length = j.value("length", r.params.length);
    r.params.radius = j.value("radius", r.params.radius);
    r.params.spacing = j.value("spacing", r.params.spacing);
    r.params.target_speed = j.value("target_speed", r.params.target_speed);
    r.params.speed_profile = speed_profile_from(j.value("speed_profile", std::string("constant")));
    r.params.profile_accel = j.value("profile_accel", r.params.profile_accel);
    r.params.spline_segments = j.value("spline_segments", r.params.spline_segments);
    r.duration = j.value("duration", r.duration);
    r.seed_offset = j.value("seed_offset", r.seed_offset);
    return r;
}

json arch_to_json(const nn::ArchitectureSpec& a) {
    json convs = json::array();
    for (const auto& c : a.conv_layers) convs.push_back({{"channels", c.channels}, {"kernel", c.kernel}});
    return {{"variant", a.variant_name()}, {"lstm_sizes", a.lstm_sizes}, {"conv_layers", convs},
            {"dropout_rate", a.dropout_rate}};
}

nn::ArchitectureSpec arch_from_json(const json& j, const nn::ArchitectureSpec& base) {
    nn::ArchitectureSpec a = base;
    if (j.contains("variant")) {
        const std::string v = j.at("variant").get<std::string>();
        if (v == "lstm5")
            a = nn::ArchitectureSpec::desk_lstm5();
        else if (v == "conv_lstm")
            a = nn::ArchitectureSpec::desk_conv_lstm();
        else if (v == "conv1d")
            a = nn::ArchitectureSpec::desk_conv1d();
        else
            throw Error("unknown architecture variant: " + v);
    }
    if (j.contains("lstm_sizes")) a.lstm_sizes = j.at("lstm_sizes").get<std::vector<int>>();
    if (j.contains("conv_layers")) {
        a.conv_layers.clear();
        for (const auto& c : j.at("conv_layers"))
            a.conv_layers.push_back({c.at("channels").get<int>(), c.at("kernel").get<int>()});
    }
    if (j.contains("dropout_rate")) a.dropout_rate = j.at("dropout_rate").get<double>();
    return a;
}

}  // namespace

ExperimentConfig default_config() {
    ExperimentConfig cfg;

    RouteSpec figure8;
    figure8.kind = sim::RouteKind::kFigure8;
    figure8.params.radius = 20.0;
    figure8.params.target_speed = 5.0;
    figure8.duration = 240.0;

    RouteSpec straight;
    straight.kind = sim::RouteKind::kStraight;
    straight.params.length = 400.0;
    straight.params.target_speed = 8.0;
    straight.params.speed_profile = sim::SpeedProfile::kTrapezoid;
    straight.duration = 90.0;

    RouteSpec circle;
    circle.kind = sim::RouteKind::kCircle;
    circle.params.radius = 20.0;
    circle.params.target_speed = 5.0;
    circle.duration = 120.0;

    RouteSpec spline1;
    spline1.kind = sim::RouteKind::kSplineRandom;
    spline1.params.target_speed = 7.0;
    spline1.params.speed_profile = sim::SpeedProfile::kSeededVariation;
    spline1.params.spline_segments = 14;
    spline1.duration = 300.0;
    spline1.seed_offset = 1;

    RouteSpec spline2 = spline1;
    spline2.duration = 300.0;
    spline2.seed_offset = 2;

    cfg.collect_routes = {figure8, straight, circle, spline1, spline2};

    RouteSpec eval_fig8 = figure8;
    eval_fig8.duration = 120.0;
    RouteSpec eval_spline = spline1;
    eval_spline.seed_offset = 9;
    eval_spline.duration = 180.0;
    cfg.eval_routes = {eval_fig8, eval_spline};

    cfg.training.epochs = 50;
    return cfg;
}

void apply_profile(ExperimentConfig& cfg, const std::string& profile) {
    if (profile == "desk") {
        if (cfg.architecture.variant == nn::ArchVariant::kLstm5)
            cfg.architecture = nn::ArchitectureSpec::desk_lstm5();
        else if (cfg.architecture.variant == nn::ArchVariant::kConvLstm)
            cfg.architecture = nn::ArchitectureSpec::desk_conv_lstm();
        else
            cfg.architecture = nn::ArchitectureSpec::desk_conv1d();
        cfg.training.epochs = std::min(cfg.training.epochs, 50);
    } else if (profile == "paper") {
        if (cfg.architecture.variant == nn::ArchVariant::kLstm5)
            cfg.architecture = nn::ArchitectureSpec::paper_lstm5();
        else if (cfg.architecture.variant == nn::ArchVariant::kConvLstm)
            cfg.architecture = nn::ArchitectureSpec::paper_conv_lstm();
        else
            cfg.architecture = nn::ArchitectureSpec::paper_conv1d();
        cfg.training.epochs = 500;
    } else {
        throw Error("unknown profile: " + profile);
    }
    cfg.profile = profile;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    const json j = json::parse(read_file(path));
    ExperimentConfig cfg = default_config();

    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("profile")) apply_profile(cfg, j.at("profile").get<std::string>());
    cfg.rate_hz = j.value("rate_hz", cfg.rate_hz);
    cfg.dt = j.value("dt", cfg.dt);

    if (j.contains("vehicle")) {
        const auto& v = j.at("vehicle");
        cfg.vehicle.wheelbase = v.value("wheelbase", cfg.vehicle.wheelbase);
        cfg.vehicle.max_steer = v.value("max_steer", cfg.vehicle.max_steer);
        cfg.vehicle.max_accel = v.value("max_accel", cfg.vehicle.max_accel);
        cfg.vehicle.max_brake = v.value("max_brake", cfg.vehicle.max_brake);
        cfg.vehicle.steer_rate = v.value("steer_rate", cfg.vehicle.steer_rate);
        cfg.vehicle.drag = v.value("drag", cfg.vehicle.drag);
    }
    if (j.contains("expert")) {
        const auto& e = j.at("expert");
        cfg.expert.pursuit.lookahead = e.value("lookahead", cfg.expert.pursuit.lookahead);
        if (e.contains("longitudinal"))
            cfg.expert.longitudinal = gains_from_json(e.at("longitudinal"), cfg.expert.longitudinal);
        if (e.contains("lateral"))
            cfg.expert.lateral = gains_from_json(e.at("lateral"), cfg.expert.lateral);
        cfg.expert.lpf_tau = e.value("lpf_tau", cfg.expert.lpf_tau);
        cfg.expert.noise_sigma = e.value("noise_sigma", cfg.expert.noise_sigma);
        cfg.expert.noise_tau = e.value("noise_tau", cfg.expert.noise_tau);
        cfg.expert.track_width = e.value("track_width", cfg.expert.track_width);
    }
    if (j.contains("tracker")) {
        const auto& t = j.at("tracker");
        if (t.contains("kind"))
            cfg.tracker = ctrl::tracker_kind_from_string(t.at("kind").get<std::string>());
        if (t.contains("pure_pursuit")) {
            const auto& p = t.at("pure_pursuit");
            cfg.pursuit.lookahead = p.value("lookahead", cfg.pursuit.lookahead);
            cfg.pursuit.speed_scaled = p.value("speed_scaled", cfg.pursuit.speed_scaled);
        }
        if (t.contains("mpc")) {
            const auto& m = t.at("mpc");
            cfg.mpc.horizon = m.value("horizon", cfg.mpc.horizon);
            cfg.mpc.dt = m.value("dt", cfg.mpc.dt);
            cfg.mpc.q_xy = m.value("q_xy", cfg.mpc.q_xy);
            cfg.mpc.q_yaw = m.value("q_yaw", cfg.mpc.q_yaw);
            cfg.mpc.r_omega = m.value("r_omega", cfg.mpc.r_omega);
            cfg.mpc.r_dv = m.value("r_dv", cfg.mpc.r_dv);
            cfg.mpc.iterations = m.value("iterations", cfg.mpc.iterations);
            cfg.mpc.step_size = m.value("step_size", cfg.mpc.step_size);
            cfg.mpc.v_max = m.value("v_max", cfg.mpc.v_max);
            cfg.mpc.omega_max = m.value("omega_max", cfg.mpc.omega_max);
        }
    }
    if (j.contains("pid")) {
        const auto& p = j.at("pid");
        if (p.contains("longitudinal"))
            cfg.pid_longitudinal = gains_from_json(p.at("longitudinal"), cfg.pid_longitudinal);
        if (p.contains("lateral")) cfg.pid_lateral = gains_from_json(p.at("lateral"), cfg.pid_lateral);
        cfg.pid_split.deadband = p.value("split_deadband", cfg.pid_split.deadband);
    }
    if (j.contains("routes")) {
        const auto& r = j.at("routes");
        if (r.contains("collect")) {
            cfg.collect_routes.clear();
            for (const auto& item : r.at("collect")) cfg.collect_routes.push_back(route_from_json(item));
        }
        if (r.contains("eval")) {
            cfg.eval_routes.clear();
            for (const auto& item : r.at("eval")) cfg.eval_routes.push_back(route_from_json(item));
        }
    }
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        cfg.window = d.value("window", cfg.window);
        cfg.stride = d.value("stride", cfg.stride);
        cfg.augment_enabled = d.value("augment_enabled", cfg.augment_enabled);
        if (d.contains("augment")) {
            const auto& a = d.at("augment");
            cfg.augment.flip = a.value("flip", cfg.augment.flip);
            cfg.augment.warp = a.value("warp", cfg.augment.warp);
            cfg.augment.noise = a.value("noise", cfg.augment.noise);
            cfg.augment.warp_lo = a.value("warp_lo", cfg.augment.warp_lo);
            cfg.augment.warp_hi = a.value("warp_hi", cfg.augment.warp_hi);
            cfg.augment.noise_sigma = a.value("noise_sigma", cfg.augment.noise_sigma);
        }
    }
    if (j.contains("architecture"))
        cfg.architecture = arch_from_json(j.at("architecture"), cfg.architecture);
    if (j.contains("training")) {
        const auto& t = j.at("training");
        cfg.training.epochs = t.value("epochs", cfg.training.epochs);
        cfg.training.batch_size = t.value("batch_size", cfg.training.batch_size);
        cfg.training.lr = t.value("lr", cfg.training.lr);
        cfg.training.decay = t.value("decay", cfg.training.decay);
        if (t.contains("loss"))
            cfg.training.loss.kind = nn::loss_kind_from_string(t.at("loss").get<std::string>());
        cfg.training.loss.delta = t.value("huber_delta", cfg.training.loss.delta);
        cfg.training.clip_norm = t.value("clip_norm", cfg.training.clip_norm);
        cfg.training.val_fraction = t.value("val_fraction", cfg.training.val_fraction);
        cfg.training.threads = t.value("threads", cfg.training.threads);
    }
    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        if (e.contains("pairings")) cfg.pairings = e.at("pairings").get<std::vector<std::string>>();
        cfg.episode_duration = e.value("episode_duration", cfg.episode_duration);
        cfg.eval_stride = e.value("eval_stride", cfg.eval_stride);
        cfg.warmup_steps = e.value("warmup_steps", cfg.warmup_steps);
        if (e.contains("input_source"))
            cfg.input_source = e.at("input_source").get<std::string>() == "measured"
                                   ? ctrl::InputSource::kMeasured
                                   : ctrl::InputSource::kCommands;
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        cfg.noise.mu = n.value("mu", cfg.noise.mu);
        cfg.noise.sigma = n.value("sigma", cfg.noise.sigma);
        if (n.contains("seeds")) cfg.noise.seeds = n.at("seeds").get<std::vector<std::uint64_t>>();
    }
    if (j.contains("paths")) {
        cfg.out_dir = j.at("paths").value("out_dir", cfg.out_dir.string());
    }

    // seed flows into training unless training.seed was pinned explicitly
    cfg.training.seed = j.contains("training") && j.at("training").contains("seed")
                            ? j.at("training").at("seed").get<std::uint64_t>()
                            : cfg.seed;
    cfg.training.augment_enabled = cfg.augment_enabled;
    cfg.training.augment = cfg.augment;

    cfg.validate();
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
    json j;
    j["seed"] = cfg.seed;
    j["profile"] = cfg.profile;
    j["rate_hz"] = cfg.rate_hz;
    j["dt"] = cfg.dt;
    j["vehicle"] = {{"wheelbase", cfg.vehicle.wheelbase}, {"max_steer", cfg.vehicle.max_steer},
                    {"max_accel", cfg.vehicle.max_accel}, {"max_brake", cfg.vehicle.max_brake},
                    {"steer_rate", cfg.vehicle.steer_rate}, {"drag", cfg.vehicle.drag}};
    j["expert"] = {{"lookahead", cfg.expert.pursuit.lookahead},
                   {"longitudinal", gains_to_json(cfg.expert.longitudinal)},
                   {"lateral", gains_to_json(cfg.expert.lateral)},
                   {"lpf_tau", cfg.expert.lpf_tau},
                   {"noise_sigma", cfg.expert.noise_sigma},
                   {"noise_tau", cfg.expert.noise_tau},
                   {"track_width", cfg.expert.track_width}};
    j["tracker"] = {{"kind", ctrl::to_string(cfg.tracker)},
                    {"pure_pursuit",
                     {{"lookahead", cfg.pursuit.lookahead}, {"speed_scaled", cfg.pursuit.speed_scaled}}},
                    {"mpc",
                     {{"horizon", cfg.mpc.horizon},
                      {"dt", cfg.mpc.dt},
                      {"q_xy", cfg.mpc.q_xy},
                      {"q_yaw", cfg.mpc.q_yaw},
                      {"r_omega", cfg.mpc.r_omega},
                      {"r_dv", cfg.mpc.r_dv},
                      {"iterations", cfg.mpc.iterations},
                      {"step_size", cfg.mpc.step_size},
                      {"v_max", cfg.mpc.v_max},
                      {"omega_max", cfg.mpc.omega_max}}}};
    j["pid"] = {{"longitudinal", gains_to_json(cfg.pid_longitudinal)},
                {"lateral", gains_to_json(cfg.pid_lateral)},
                {"split_deadband", cfg.pid_split.deadband}};
    json collect = json::array(), eval_routes = json::array();
    for (const auto& r : cfg.collect_routes) collect.push_back(route_to_json(r));
    for (const auto& r : cfg.eval_routes) eval_routes.push_back(route_to_json(r));
    j["routes"] = {{"collect", collect}, {"eval", eval_routes}};
    j["dataset"] = {{"window", cfg.window},
                    {"stride", cfg.stride},
                    {"augment_enabled", cfg.augment_enabled},
                    {"augment",
                     {{"flip", cfg.augment.flip},
                      {"warp", cfg.augment.warp},
                      {"noise", cfg.augment.noise},
                      {"warp_lo", cfg.augment.warp_lo},
                      {"warp_hi", cfg.augment.warp_hi},
                      {"noise_sigma", cfg.augment.noise_sigma}}}};
    j["architecture"] = arch_to_json(cfg.architecture);
    j["training"] = {{"epochs", cfg.training.epochs},
                     {"batch_size", cfg.training.batch_size},
                     {"lr", cfg.training.lr},
                     {"decay", cfg.training.decay},
                     {"loss", nn::to_string(cfg.training.loss.kind)},
                     {"huber_delta", cfg.training.loss.delta},
                     {"clip_norm", cfg.training.clip_norm},
                     {"val_fraction", cfg.training.val_fraction},
                     {"threads", cfg.training.threads}};
    j["evaluation"] = {{"pairings", cfg.pairings},
                       {"episode_duration", cfg.episode_duration},
                       {"eval_stride", cfg.eval_stride},
                       {"warmup_steps", cfg.warmup_steps},
                       {"input_source",
                        cfg.input_source == ctrl::InputSource::kMeasured ? "measured" : "commands"}};
    j["noise"] = {{"mu", cfg.noise.mu}, {"sigma", cfg.noise.sigma}, {"seeds", cfg.noise.seeds}};
    j["paths"] = {{"out_dir", cfg.out_dir.string()}};
    atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace n2c::cli

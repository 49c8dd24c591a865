#include "n2c/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "n2c/io.hpp"
#include "json.hpp"

namespace n2c::cli {

std::vector<can::SignalDef> simulator_signal_defs() {
    using can::ByteOrder;
    std::vector<can::SignalDef> defs;
    auto add = [&defs](std::uint32_t id, const char* name, int start, int len, bool is_signed,
                       double scale, double lo, double hi, const char* unit) {
        can::SignalDef d;
        d.arbitration_id = id;
        d.spec.name = name;
        d.spec.start_bit = start;
        d.spec.bit_length = len;
        d.spec.byte_order = ByteOrder::kLittleEndian;
        d.spec.is_signed = is_signed;
        d.spec.scale = scale;
        d.spec.offset = 0.0;
        d.spec.unit = unit;
        d.spec.min = lo;
        d.spec.max = hi;
        defs.push_back(std::move(d));
    };
    add(0x201, "wheel_speed_fl", 0, 16, false, 0.01, 0.0, 655.35, "m/s");
    add(0x201, "wheel_speed_fr", 16, 16, false, 0.01, 0.0, 655.35, "m/s");
    add(0x201, "wheel_speed_rl", 32, 16, false, 0.01, 0.0, 655.35, "m/s");
    add(0x201, "wheel_speed_rr", 48, 16, false, 0.01, 0.0, 655.35, "m/s");
    add(0x2B0, "steering", 0, 16, true, 0.0005, -1.0, 1.0, "rad");
    add(0x2C0, "throttle", 0, 16, false, 0.0001, 0.0, 1.0, "");
    add(0x2C0, "brake", 16, 16, false, 0.0001, 0.0, 1.0, "");
    add(0x2C0, "torque", 32, 16, true, 0.0001, -1.0, 1.0, "");
    return defs;
}

void cmd_decode(const std::filesystem::path& log_path, const std::filesystem::path& spec_path,
                const std::filesystem::path& out_csv, double rate_hz, std::ostream& diag) {
    const auto frames = can::parse_candump_log(log_path);
    const auto defs = can::load_signal_defs(spec_path);
    if (frames.empty()) {
        diag << "warning: empty log, writing header-only CSV\n";
        atomic_write_file(out_csv, can::drive_records_to_csv({}));
        return;
    }
    const auto records = can::decode_drive_records(frames, defs, rate_hz);
    atomic_write_file(out_csv, can::drive_records_to_csv(records));
    diag << "decoded " << records.size() << " records from " << frames.size() << " frames\n";
}

void cmd_discover(const std::filesystem::path& log_path, const std::filesystem::path& windows_path,
                  const std::filesystem::path& spec_path,
                  const std::optional<std::filesystem::path>& out_csv, std::ostream& report) {
    const auto frames = can::parse_candump_log(log_path);
    const auto windows = can::load_stimulus_windows(windows_path);
    const auto defs = can::load_signal_defs(spec_path);
    std::vector<can::SignalSpec> candidates;
    candidates.reserve(defs.size());
    for (const auto& d : defs) candidates.push_back(d.spec);

    const auto results = can::discover_arbitration_ids(frames, windows, candidates);
    std::string csv = "arbitration_id,signal,score\n";
    char idbuf[16];
    for (const auto& r : results) {
        std::snprintf(idbuf, sizeof(idbuf), "0x%03X", r.arbitration_id);
        csv += std::string(idbuf) + ',' + r.spec.name + ',' + fmt_double(r.score) + '\n';
    }
    report << csv;
    if (out_csv) atomic_write_file(*out_csv, csv);
}

namespace {

std::string index_name(const char* prefix, std::size_t i, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%03zu%s", prefix, i, suffix);
    return buf;
}

std::string signal_defs_json(const std::vector<can::SignalDef>& defs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : defs) {
        arr.push_back({{"name", d.spec.name},
                       {"arbitration_id", d.arbitration_id},
                       {"start_bit", d.spec.start_bit},
                       {"bit_length", d.spec.bit_length},
                       {"byte_order", d.spec.byte_order == can::ByteOrder::kBigEndian
                                          ? "big_endian"
                                          : "little_endian"},
                       {"signed", d.spec.is_signed},
                       {"scale", d.spec.scale},
                       {"offset", d.spec.offset},
                       {"unit", d.spec.unit},
                       {"min", d.spec.min},
                       {"max", d.spec.max}});
    }
    return arr.dump(2) + "\n";
}

}  // namespace

CollectResult cmd_collect(const ExperimentConfig& cfg, bool use_eval_routes,
                          const std::filesystem::path& out_dir, bool emit_candump,
                          std::ostream& diag) {
    const auto& routes = use_eval_routes ? cfg.eval_routes : cfg.collect_routes;
    if (routes.empty()) throw Error("collect: no routes configured");
    std::filesystem::create_directories(out_dir);

    const auto defs = simulator_signal_defs();
    CollectResult result;
    for (std::size_t i = 0; i < routes.size(); ++i) {
        const sim::Route route = routes[i].build(cfg.seed);
        ctrl::ClosedLoopConfig run;
        run.vehicle = cfg.vehicle;
        run.controller = ctrl::ControllerKind::kExpert;
        run.expert = cfg.expert;
        run.expert_noise = true;
        run.noise_seed = seed_for(cfg.seed, SeedDomain::kEpisode, i + (use_eval_routes ? 1000 : 0));
        run.duration = routes[i].duration;
        run.dt = cfg.dt;

        const ctrl::EpisodeLog log = ctrl::closed_loop_run(route, run);
        if (log.off_route)
            diag << "warning: expert left route " << i << " at t=" << log.off_route_t << "\n";

        atomic_write_file(out_dir / index_name("records_", i, ".csv"),
                          can::drive_records_to_csv(log.records));
        atomic_write_file(out_dir / index_name("pose_", i, ".csv"), episode_to_csv(log));
        if (emit_candump) {
            const auto frames = can::encode_drive_records(log.records, defs, "vcan0");
            std::string text;
            for (const auto& f : frames) {
                text += can::format_candump_line(f);
                text += '\n';
            }
            atomic_write_file(out_dir / index_name("candump_", i, ".log"), text);
        }

        result.episodes += 1;
        result.records += log.records.size();
        if (log.records.size() >= static_cast<std::size_t>(cfg.window))
            result.window_capacity += log.records.size() - static_cast<std::size_t>(cfg.window) + 1;
    }
    if (emit_candump) atomic_write_file(out_dir / "signal_specs.json", signal_defs_json(defs));
    diag << "collected " << result.records << " records over " << result.episodes << " episodes ("
         << result.window_capacity << " stride-1 windows)\n";
    return result;
}

eval::RecordEpisodes load_record_episodes(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("records_", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no records_*.csv files in " + dir.string());
    eval::RecordEpisodes episodes;
    for (const auto& f : files) episodes.push_back(can::drive_records_from_csv(read_file(f)));
    return episodes;
}

ctrl::SequenceDataset dataset_from_episodes(const eval::RecordEpisodes& episodes, int window,
                                            int stride) {
    ctrl::SequenceDataset ds;
    for (const auto& ep : episodes) {
        if (ep.size() < static_cast<std::size_t>(window)) continue;
        ds.append(ctrl::build_dataset(ep, window, stride));
    }
    if (ds.count() == 0) throw ctrl::DataError("StreamTooShort: no episode provides a full window");
    return ds;
}

TrainResult cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                      const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& resume, std::ostream& diag) {
    const auto episodes = load_record_episodes(data_dir);
    const auto ds = dataset_from_episodes(episodes, cfg.window, cfg.stride);
    diag << "training on " << ds.count() << " windows of " << cfg.window << " steps\n";

    std::optional<nn::NetworkParams> resume_params;
    if (resume) {
        const ctrl::Checkpoint prev = ctrl::load_checkpoint(*resume);
        nn::Vec a, b;
        prev.params.flatten(a);
        nn::NetworkParams::zeros(cfg.architecture).flatten(b);
        if (prev.spec.variant_name() != cfg.architecture.variant_name() || a.size() != b.size())
            throw Error("resume: checkpoint architecture does not match the config");
        resume_params = prev.params;
    }

    const ctrl::Checkpoint ckpt = ctrl::train(ds, cfg.architecture, cfg.training, resume_params);

    std::filesystem::create_directories(out_dir);
    TrainResult result;
    result.checkpoint_path = out_dir / "checkpoint.json";
    result.best_val_loss = ckpt.best_val_loss;
    result.best_epoch = ckpt.best_epoch;
    save_checkpoint(ckpt, result.checkpoint_path);

    std::string curve = "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < ckpt.curve.size(); ++e)
        curve += std::to_string(e) + ',' + fmt_double(ckpt.curve[e].train_loss) + ',' +
                 fmt_double(ckpt.curve[e].val_loss) + '\n';
    atomic_write_file(out_dir / "loss_curve.csv", curve);

    diag << "best val loss " << ckpt.best_val_loss << " at epoch " << ckpt.best_epoch << "\n";
    return result;
}

ctrl::ClosedLoopConfig closed_loop_config(const ExperimentConfig& cfg, const std::string& pairing,
                                          const ctrl::Checkpoint* ckpt) {
    ctrl::ClosedLoopConfig run;
    run.vehicle = cfg.vehicle;
    run.pursuit = cfg.pursuit;
    run.mpc = cfg.mpc;
    run.expert = cfg.expert;
    run.expert_noise = false;
    run.noise_seed = cfg.seed;
    run.duration = cfg.episode_duration;
    run.dt = cfg.dt;
    run.input_source = cfg.input_source;
    run.pid_longitudinal = cfg.pid_longitudinal;
    run.pid_split = cfg.pid_split;
    run.pid_lateral = cfg.pid_lateral;
    run.start_at_route_speed = true;

    if (pairing == "pp_nn" || pairing == "pp_pid")
        run.tracker = ctrl::TrackerKind::kPurePursuit;
    else if (pairing == "mpc_nn" || pairing == "mpc_pid")
        run.tracker = ctrl::TrackerKind::kMpc;
    else
        throw Error("not a tracker pairing: " + pairing);

    if (pairing == "pp_nn" || pairing == "mpc_nn") {
        run.controller = ctrl::ControllerKind::kN2c;
        run.checkpoint = ckpt;
        if (!ckpt) throw ctrl::DataError("MissingArtifacts: pairing " + pairing + " needs a checkpoint");
    } else {
        run.controller = ctrl::ControllerKind::kPid;
    }
    return run;
}

namespace {

// Closed-loop pairing pooled over every eval route.
eval::TripleMetrics pooled_pairing(const ExperimentConfig& cfg, const std::string& pairing,
                                   const ctrl::Checkpoint* ckpt, bool& off_route,
                                   std::ostream& diag) {
    std::vector<std::array<double, 3>> ref_all, act_all;
    off_route = false;
    for (const auto& rspec : cfg.eval_routes) {
        const sim::Route route = rspec.build(cfg.seed);
        const ctrl::ClosedLoopConfig run = closed_loop_config(cfg, pairing, ckpt);
        const ctrl::EpisodeLog log = ctrl::closed_loop_run(route, run);
        if (log.off_route) {
            off_route = true;
            diag << "warning: " << pairing << " left the route at t=" << log.off_route_t << "\n";
        }
        if (log.rows.size() <= static_cast<std::size_t>(cfg.warmup_steps)) continue;
        const auto reference = ctrl::expert_reference_triples(log, cfg.expert, cfg.dt);
        for (std::size_t i = static_cast<std::size_t>(cfg.warmup_steps); i < log.rows.size(); ++i) {
            act_all.push_back({log.rows[i].throttle, log.rows[i].brake, log.rows[i].torque});
            ref_all.push_back(reference[i]);
        }
    }
    if (ref_all.empty()) throw ctrl::DataError("MissingArtifacts: no closed-loop samples collected");
    return eval::triple_metrics(ref_all, act_all);
}

std::string arch_label(const ctrl::Checkpoint& ckpt) { return ckpt.spec.variant_name(); }
std::string loss_label(const ctrl::Checkpoint& ckpt) { return nn::to_string(ckpt.config.loss.kind); }

}  // namespace

std::vector<eval::MetricRow> cmd_eval(const ExperimentConfig& cfg,
                                      const std::vector<std::filesystem::path>& checkpoints,
                                      const std::filesystem::path& test_data_dir,
                                      const std::filesystem::path& out_dir, std::ostream& diag) {
    if (checkpoints.empty()) throw Error("eval: no checkpoints given");
    const bool wants_human =
        std::find(cfg.pairings.begin(), cfg.pairings.end(), "human") != cfg.pairings.end();
    eval::RecordEpisodes test_episodes;
    if (wants_human) test_episodes = load_record_episodes(test_data_dir);

    // PID pairings are loss- and architecture-independent; compute once.
    std::map<std::string, eval::TripleMetrics> pid_cells;
    for (const auto& pairing : cfg.pairings) {
        if (pairing == "pp_pid" || pairing == "mpc_pid") {
            bool off = false;
            pid_cells[pairing] = pooled_pairing(cfg, pairing, nullptr, off, diag);
        }
    }

    std::vector<eval::MetricRow> rows;
    for (const auto& path : checkpoints) {
        const ctrl::Checkpoint ckpt = ctrl::load_checkpoint(path);
        const std::string arch = arch_label(ckpt);
        const std::string loss = loss_label(ckpt);
        diag << "evaluating " << arch << "/" << loss << " seed " << ckpt.seed << "\n";
        for (const auto& pairing : cfg.pairings) {
            if (pairing == "human") {
                rows.push_back(eval::metric_row_from(
                    eval::evaluate_expert_replay(ckpt, test_episodes, cfg.eval_stride), arch,
                    "human", loss, ckpt.seed));
            } else if (pairing == "pp_pid" || pairing == "mpc_pid") {
                rows.push_back(eval::metric_row_from(pid_cells.at(pairing), arch, pairing, loss,
                                                     ckpt.seed));
            } else {
                bool off = false;
                rows.push_back(eval::metric_row_from(pooled_pairing(cfg, pairing, &ckpt, off, diag),
                                                     arch, pairing, loss, ckpt.seed));
            }
        }
    }

    eval::render_report(rows, out_dir);
    return rows;
}

std::vector<eval::MetricRow> cmd_noise(const ExperimentConfig& cfg,
                                       const std::vector<std::filesystem::path>& checkpoints,
                                       const std::filesystem::path& test_data_dir,
                                       const std::filesystem::path& out_dir, std::ostream& diag) {
    if (checkpoints.empty()) throw Error("noise: no checkpoints given");
    const auto test_episodes = load_record_episodes(test_data_dir);

    std::vector<eval::MetricRow> rows;
    for (const auto& path : checkpoints) {
        const ctrl::Checkpoint ckpt = ctrl::load_checkpoint(path);
        diag << "noise study for " << arch_label(ckpt) << "/" << loss_label(ckpt) << "\n";
        const auto study = eval::noise_study(ckpt, arch_label(ckpt), loss_label(ckpt),
                                             test_episodes, cfg.eval_stride, cfg.noise);
        rows.insert(rows.end(), study.begin(), study.end());
    }

    std::filesystem::create_directories(out_dir);
    atomic_write_file(out_dir / "noise_report.csv", eval::rows_to_csv(rows));
    atomic_write_file(out_dir / "noise_report.md", eval::render_markdown(rows));
    return rows;
}

void cmd_closed_loop(const ExperimentConfig& cfg, const std::string& pairing,
                     const std::optional<std::filesystem::path>& checkpoint,
                     const std::filesystem::path& out_dir, std::ostream& diag) {
    std::optional<ctrl::Checkpoint> ckpt;
    if (checkpoint) ckpt = ctrl::load_checkpoint(*checkpoint);

    if (cfg.eval_routes.empty()) throw Error("closed-loop: no eval routes configured");
    const sim::Route route = cfg.eval_routes.front().build(cfg.seed);
    const ctrl::ClosedLoopConfig run = closed_loop_config(cfg, pairing, ckpt ? &*ckpt : nullptr);
    const ctrl::EpisodeLog log = ctrl::closed_loop_run(route, run);

    std::filesystem::create_directories(out_dir);
    atomic_write_file(out_dir / "episode.csv", episode_to_csv(log));

    std::string summary = "pairing: " + pairing + "\n";
    summary += "steps: " + std::to_string(log.rows.size()) + "\n";
    summary += std::string("off_route: ") + (log.off_route ? "yes" : "no") + "\n";
    if (log.rows.size() > static_cast<std::size_t>(cfg.warmup_steps)) {
        const auto reference = ctrl::expert_reference_triples(log, cfg.expert, cfg.dt);
        std::vector<std::array<double, 3>> act, ref;
        for (std::size_t i = static_cast<std::size_t>(cfg.warmup_steps); i < log.rows.size(); ++i) {
            act.push_back({log.rows[i].throttle, log.rows[i].brake, log.rows[i].torque});
            ref.push_back(reference[i]);
        }
        const auto m = eval::triple_metrics(ref, act);
        summary += "rmse_vs_expert_reference: " + fmt_double(m.rmse) + "\n";
        summary += "mae_vs_expert_reference: " + fmt_double(m.mae) + "\n";
    }
    atomic_write_file(out_dir / "summary.txt", summary);
    diag << summary;
}

void cmd_report(const std::vector<std::filesystem::path>& row_csvs,
                const std::filesystem::path& out_dir) {
    std::vector<eval::MetricRow> rows;
    for (const auto& path : row_csvs) {
        const auto part = eval::rows_from_csv(read_file(path));
        rows.insert(rows.end(), part.begin(), part.end());
    }
    eval::render_report(rows, out_dir);
}

}  // namespace n2c::cli

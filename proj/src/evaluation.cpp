#include "n2c/evaluation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "n2c/io.hpp"

namespace n2c::eval {

MetricRow metric_row_from(const TripleMetrics& m, std::string arch, std::string pairing,
                          std::string loss, std::uint64_t seed) {
    MetricRow row;
    row.arch = std::move(arch);
    row.pairing = std::move(pairing);
    row.loss = std::move(loss);
    row.seed = seed;
    row.n_samples = m.count;
    row.rmse = m.rmse;
    row.mae = m.mae;
    row.rmse_channel = m.rmse_channel;
    row.mae_channel = m.mae_channel;
    return row;
}

namespace {

TripleMetrics replay_metrics(const ctrl::Checkpoint& ckpt, const RecordEpisodes& episodes, int stride,
                             double sigma, std::uint64_t noise_seed) {
    if (stride < 1) throw Error("replay stride must be >= 1");

    Rng rng(seed_for(noise_seed, SeedDomain::kNoiseStudy, 0));
    std::vector<std::array<double, 3>> predicted, recorded;
    std::vector<std::array<double, 2>> history(static_cast<std::size_t>(ckpt.window));
    for (const auto& records : episodes) {
        if (records.size() < static_cast<std::size_t>(ckpt.window)) continue;
        for (std::size_t end = static_cast<std::size_t>(ckpt.window) - 1; end < records.size();
             end += static_cast<std::size_t>(stride)) {
            for (int t = 0; t < ckpt.window; ++t) {
                const auto& rec = records[end - static_cast<std::size_t>(ckpt.window - 1 - t)];
                history[static_cast<std::size_t>(t)] = {rec.speed, rec.steering};
            }
            predicted.push_back(sigma > 0.0 ? ctrl::predict_noisy(ckpt, history, sigma, rng)
                                            : ctrl::predict(ckpt, history));
            recorded.push_back({records[end].throttle, records[end].brake, records[end].torque});
        }
    }
    if (predicted.empty())
        throw ctrl::DataError("MissingArtifacts: no test windows as long as the model window");
    return triple_metrics(recorded, predicted);
}

}  // namespace

TripleMetrics evaluate_expert_replay(const ctrl::Checkpoint& ckpt, const RecordEpisodes& episodes,
                                     int stride) {
    return replay_metrics(ckpt, episodes, stride, 0.0, 0);
}

TripleMetrics evaluate_expert_replay_noisy(const ctrl::Checkpoint& ckpt, const RecordEpisodes& episodes,
                                           int stride, double sigma, std::uint64_t noise_seed) {
    return replay_metrics(ckpt, episodes, stride, sigma, noise_seed);
}

PairingOutcome evaluate_tracker_pairing(const sim::Route& route, const ctrl::ClosedLoopConfig& cfg,
                                        int warmup_steps) {
    const ctrl::EpisodeLog log = ctrl::closed_loop_run(route, cfg);
    PairingOutcome out;
    out.off_route = log.off_route;
    if (log.rows.size() <= static_cast<std::size_t>(warmup_steps))
        throw ctrl::DataError("MissingArtifacts: episode shorter than the warmup");

    const auto reference = ctrl::expert_reference_triples(log, cfg.expert, cfg.dt);
    std::vector<std::array<double, 3>> actual, ref;
    for (std::size_t i = static_cast<std::size_t>(warmup_steps); i < log.rows.size(); ++i) {
        actual.push_back({log.rows[i].throttle, log.rows[i].brake, log.rows[i].torque});
        ref.push_back(reference[i]);
    }
    out.metrics = triple_metrics(ref, actual);
    return out;
}

std::vector<MetricRow> noise_study(const ctrl::Checkpoint& ckpt, const std::string& arch_label,
                                   const std::string& loss_label, const RecordEpisodes& episodes,
                                   int stride, const NoiseStudyConfig& cfg) {
    cfg.validate();
    std::vector<MetricRow> rows;
    rows.push_back(metric_row_from(evaluate_expert_replay(ckpt, episodes, stride), arch_label,
                                   "human", loss_label, 0));
    for (std::uint64_t seed : cfg.seeds) {
        rows.push_back(metric_row_from(
            evaluate_expert_replay_noisy(ckpt, episodes, stride, cfg.sigma, seed), arch_label,
            "human_noise", loss_label, seed));
    }
    return rows;
}

std::string rows_to_csv(const std::vector<MetricRow>& rows) {
    std::string out = kReportCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.arch + ',' + r.pairing + ',' + r.loss + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.n_samples);
        for (double v : {r.rmse, r.mae, r.rmse_channel[0], r.rmse_channel[1], r.rmse_channel[2],
                         r.mae_channel[0], r.mae_channel[1], r.mae_channel[2]}) {
            out += ',';
            out += fmt_double(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<MetricRow> rows_from_csv(const std::string& content) {
    std::vector<MetricRow> rows;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != kReportCsvHeader) throw Error("report CSV: unexpected header");
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 13) throw Error("report CSV line " + std::to_string(line_no) + ": expected 13 fields");
        MetricRow r;
        r.arch = std::string(f[0]);
        r.pairing = std::string(f[1]);
        r.loss = std::string(f[2]);
        const auto seed = parse_u64(f[3]);
        const auto n = parse_u64(f[4]);
        if (!seed || !n) throw Error("report CSV line " + std::to_string(line_no) + ": bad integer");
        r.seed = *seed;
        r.n_samples = static_cast<std::size_t>(*n);
        double* slots[8] = {&r.rmse,
                            &r.mae,
                            &r.rmse_channel[0],
                            &r.rmse_channel[1],
                            &r.rmse_channel[2],
                            &r.mae_channel[0],
                            &r.mae_channel[1],
                            &r.mae_channel[2]};
        for (int i = 0; i < 8; ++i) {
            const auto v = parse_double(f[static_cast<std::size_t>(i + 5)]);
            if (!v) throw Error("report CSV line " + std::to_string(line_no) + ": bad number");
            *slots[i] = *v;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

std::vector<std::string> ordered_subset(const std::set<std::string>& present,
                                        const std::vector<std::string>& preferred) {
    std::vector<std::string> out;
    for (const auto& p : preferred)
        if (present.count(p)) out.push_back(p);
    for (const auto& p : present)
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    return out;
}

std::string fmt_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5f", v);
    return buf;
}

const char* pairing_title(const std::string& p) {
    if (p == "human") return "Human Driving";
    if (p == "pp_nn") return "PP+NN";
    if (p == "pp_pid") return "PP+PID";
    if (p == "mpc_nn") return "MPC+NN";
    if (p == "mpc_pid") return "MPC+PID";
    if (p == "human_noise") return "Human Driving (noisy input)";
    return p.c_str();
}

const char* arch_title(const std::string& a) {
    if (a == "lstm5") return "LSTM-5";
    if (a == "conv_lstm") return "Conv-LSTM";
    if (a == "conv1d") return "Conv";
    return a.c_str();
}

}  // namespace

std::string render_markdown(const std::vector<MetricRow>& rows) {
    if (rows.empty()) throw Error("EmptyRows: nothing to render");

    std::set<std::string> losses, archs, pairings;
    for (const auto& r : rows) {
        if (r.loss != "-") losses.insert(r.loss);
        archs.insert(r.arch);
        pairings.insert(r.pairing);
    }
    const auto loss_order = ordered_subset(losses, {"smooth_l1", "mse"});
    const auto arch_order = ordered_subset(archs, {"lstm5", "conv_lstm", "conv1d"});
    const auto pairing_order =
        ordered_subset(pairings, {"human", "pp_nn", "pp_pid", "mpc_nn", "mpc_pid", "human_noise"});

    // (arch, pairing, loss) -> mean over seeds
    struct Acc {
        double rmse = 0.0, mae = 0.0;
        int n = 0;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Acc> cells;
    for (const auto& r : rows) {
        auto& acc = cells[{r.arch, r.pairing, r.loss}];
        acc.rmse += r.rmse;
        acc.mae += r.mae;
        acc.n += 1;
    }

    std::ostringstream md;
    md << "# Controller comparison\n\n";
    md << "RMSE/MAE pool the three output channels (throttle, brake, torque) over all\n"
          "evaluated timesteps. Cells average over seeds where several were run.\n\n";
    md << "Caveats: classical-controller cells use this repository's documented PID\n"
          "gains; the MPC follower is this repository's own formulation; closed-loop\n"
          "scores compare each controller against the noise-free scripted expert\n"
          "replayed on the identical command stream. N2C inputs in closed loop are the\n"
          "tracker commands unless noted.\n\n";

    for (const auto& loss : loss_order) {
        md << "## Loss: " << loss << "\n\n";
        md << "| Networks |";
        for (const auto& p : pairing_order) md << ' ' << pairing_title(p) << " RMSE | MAE |";
        md << "\n|---|";
        for (std::size_t i = 0; i < pairing_order.size(); ++i) md << "---|---|";
        md << "\n";
        for (const auto& arch : arch_order) {
            bool any = false;
            for (const auto& p : pairing_order)
                if (cells.count({arch, p, loss}) || cells.count({arch, p, "-"})) any = true;
            if (!any) continue;
            md << "| " << arch_title(arch) << " |";
            for (const auto& p : pairing_order) {
                auto it = cells.find({arch, p, loss});
                if (it == cells.end()) it = cells.find({arch, p, "-"});
                if (it == cells.end()) {
                    md << " - | - |";
                } else {
                    md << ' ' << fmt_cell(it->second.rmse / it->second.n) << " | "
                       << fmt_cell(it->second.mae / it->second.n) << " |";
                }
            }
            md << "\n";
        }
        md << "\n";
    }
    return md.str();
}

std::string render_channel_breakdown(const std::vector<MetricRow>& rows) {
    if (rows.empty()) throw Error("EmptyRows: nothing to render");
    std::string out = "arch,pairing,loss,seed,channel,rmse,mae\n";
    static const char* kChannels[3] = {"throttle", "brake", "torque"};
    for (const auto& r : rows)
        for (int c = 0; c < 3; ++c) {
            out += r.arch + ',' + r.pairing + ',' + r.loss + ',' + std::to_string(r.seed) + ',' +
                   kChannels[c] + ',' + fmt_double(r.rmse_channel[static_cast<std::size_t>(c)]) +
                   ',' + fmt_double(r.mae_channel[static_cast<std::size_t>(c)]) + '\n';
        }
    return out;
}

void render_report(const std::vector<MetricRow>& rows, const std::filesystem::path& out_dir) {
    if (rows.empty()) throw Error("EmptyRows: nothing to render");
    std::filesystem::create_directories(out_dir);
    atomic_write_file(out_dir / "report.csv", rows_to_csv(rows));
    atomic_write_file(out_dir / "report.md", render_markdown(rows));
    atomic_write_file(out_dir / "channel_breakdown.csv", render_channel_breakdown(rows));
}

}  // namespace n2c::eval

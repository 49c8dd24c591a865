#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "n2c/commands.hpp"

namespace {

// Flags win over the config file; the config file wins over defaults.
n2c::cli::ExperimentConfig resolve_config(const std::string& config_path,
                                          std::optional<std::uint64_t> seed,
                                          std::optional<std::string> out_dir,
                                          std::optional<std::string> profile) {
    n2c::cli::ExperimentConfig cfg = config_path.empty() ? n2c::cli::default_config()
                                                         : n2c::cli::load_config(config_path);
    if (profile) n2c::cli::apply_profile(cfg, *profile);
    if (seed) {
        cfg.seed = *seed;
        cfg.training.seed = *seed;
    }
    if (out_dir) cfg.out_dir = *out_dir;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"N2C workbench: CAN decoding, expert data collection, behavioral-cloning "
                 "controller training, and closed-loop evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> profile;
    app.add_option("--config", config_path, "experiment config JSON");
    app.add_option("--seed", seed, "root seed override");
    app.add_option("--out-dir", out_dir, "output directory override");
    app.add_option("--profile", profile, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));

    // decode
    auto* decode = app.add_subcommand("decode", "candump log -> DriveRecord CSV");
    std::string decode_log, decode_specs, decode_out;
    double decode_rate = 20.0;
    decode->add_option("--log", decode_log, "candump text log")->required();
    decode->add_option("--specs", decode_specs, "signal spec JSON")->required();
    decode->add_option("--out", decode_out, "output CSV")->required();
    decode->add_option("--rate", decode_rate, "resampling rate in Hz");

    // discover
    auto* discover = app.add_subcommand("discover", "rank arbitration ids against stimulus windows");
    std::string disc_log, disc_windows, disc_specs, disc_out;
    discover->add_option("--log", disc_log)->required();
    discover->add_option("--windows", disc_windows, "stimulus window JSON")->required();
    discover->add_option("--specs", disc_specs, "candidate signal spec JSON")->required();
    discover->add_option("--out", disc_out, "optional CSV report");

    // collect
    auto* collect = app.add_subcommand("collect", "run the scripted expert and write records");
    bool collect_eval_routes = false;
    bool collect_candump = false;
    std::optional<double> collect_duration;
    collect->add_flag("--eval-routes", collect_eval_routes, "use the eval route set");
    collect->add_flag("--emit-candump", collect_candump, "also re-encode as candump logs");
    collect->add_option("--duration", collect_duration, "override every route duration (s)");

    // train
    auto* train = app.add_subcommand("train", "train the controller from collected records");
    std::string train_data;
    std::optional<std::string> train_resume;
    train->add_option("--data", train_data, "directory with records_*.csv")->required();
    train->add_option("--resume", train_resume, "checkpoint to continue from");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "pairing-matrix evaluation report");
    std::vector<std::string> eval_ckpts;
    std::string eval_test_data;
    eval_cmd->add_option("--ckpt", eval_ckpts, "checkpoint JSON (repeatable)")->required();
    eval_cmd->add_option("--test-data", eval_test_data, "held-out records directory");

    // noise
    auto* noise_cmd = app.add_subcommand("noise", "input-noise robustness study");
    std::vector<std::string> noise_ckpts;
    std::string noise_test_data;
    noise_cmd->add_option("--ckpt", noise_ckpts, "checkpoint JSON (repeatable)")->required();
    noise_cmd->add_option("--test-data", noise_test_data, "held-out records directory")->required();

    // closed-loop
    auto* cl = app.add_subcommand("closed-loop", "run one tracker+controller episode");
    std::string cl_pairing;
    std::optional<std::string> cl_ckpt;
    cl->add_option("--pairing", cl_pairing, "pp_nn | pp_pid | mpc_nn | mpc_pid")->required();
    cl->add_option("--ckpt", cl_ckpt, "checkpoint for the NN pairings");

    // report
    auto* report = app.add_subcommand("report", "re-render report files from row CSVs");
    std::vector<std::string> report_rows;
    report->add_option("--rows", report_rows, "report CSV (repeatable)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*decode) {
            n2c::cli::cmd_decode(decode_log, decode_specs, decode_out, decode_rate, std::cerr);
            return 0;
        }
        if (*discover) {
            std::optional<std::filesystem::path> out;
            if (!disc_out.empty()) out = disc_out;
            n2c::cli::cmd_discover(disc_log, disc_windows, disc_specs, out, std::cout);
            return 0;
        }

        n2c::cli::ExperimentConfig cfg = resolve_config(config_path, seed, out_dir, profile);

        if (*collect) {
            if (collect_duration) {
                for (auto& r : cfg.collect_routes) r.duration = *collect_duration;
                for (auto& r : cfg.eval_routes) r.duration = *collect_duration;
            }
            n2c::cli::cmd_collect(cfg, collect_eval_routes,
                                  cfg.out_dir / (collect_eval_routes ? "test_data" : "data"),
                                  collect_candump, std::cerr);
            return 0;
        }
        if (*train) {
            std::optional<std::filesystem::path> resume;
            if (train_resume) resume = *train_resume;
            n2c::cli::cmd_train(cfg, train_data, cfg.out_dir, resume, std::cerr);
            return 0;
        }
        if (*eval_cmd) {
            std::vector<std::filesystem::path> paths(eval_ckpts.begin(), eval_ckpts.end());
            n2c::cli::cmd_eval(cfg, paths, eval_test_data, cfg.out_dir, std::cerr);
            return 0;
        }
        if (*noise_cmd) {
            std::vector<std::filesystem::path> paths(noise_ckpts.begin(), noise_ckpts.end());
            n2c::cli::cmd_noise(cfg, paths, noise_test_data, cfg.out_dir, std::cerr);
            return 0;
        }
        if (*cl) {
            std::optional<std::filesystem::path> ckpt;
            if (cl_ckpt) ckpt = *cl_ckpt;
            n2c::cli::cmd_closed_loop(cfg, cl_pairing, ckpt, cfg.out_dir, std::cout);
            return 0;
        }
        if (*report) {
            std::vector<std::filesystem::path> paths(report_rows.begin(), report_rows.end());
            n2c::cli::cmd_report(paths, cfg.out_dir);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

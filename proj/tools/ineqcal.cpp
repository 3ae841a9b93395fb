// ineqcal: command-line driver for the two-channel inequality model toolkit.
// Subcommands mirror the pipeline stages; `reproduce-all` chains them in
// dependency order and writes a consolidated report.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ineq/artifacts.hpp"
#include "ineq/bootstrap.hpp"
#include "ineq/calib.hpp"
#include "ineq/config.hpp"
#include "ineq/microsim.hpp"
#include "ineq/parallel.hpp"
#include "ineq/regress.hpp"
#include "ineq/rng.hpp"
#include "ineq/scenarios.hpp"

namespace {

using namespace ineq;

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<std::int64_t> seed;
    int threads = 0;
    std::string stage;  // reproduce-all --stage filter
};

struct Manifest {
    std::string command;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<std::string> files;
    double wall_time_s = 0.0;

    std::string dump() const {
        nlohmann::json j;
        j["command"] = command;
        j["config_hash"] = config_hash;
        j["seed"] = seed;
        j["threads"] = threads;
        j["version"] = kVersion;
        j["artifacts"] = files;
        j["wall_time_s"] = wall_time_s;
        return j.dump(2) + "\n";
    }
};

config::RunConfig load_config(const Options& opt) {
    config::RunConfig cfg = opt.config_path.empty() ? config::RunConfig{}
                                                    : config::load(opt.config_path);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.seed) {
        cfg.seed = static_cast<std::uint64_t>(*opt.seed);
        cfg.calib.seed = derive_seed(cfg.seed, Stream::Calib);
        cfg.bootstrap.seed = derive_seed(cfg.seed, Stream::Bootstrap);
    }
    if (opt.threads > 0) cfg.threads = opt.threads;
    set_threads(cfg.threads);
    return cfg;
}

std::string out_path(const config::RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

void emit(const config::RunConfig& cfg, Manifest& man, const std::string& name,
          const std::string& content) {
    artifacts::write_file(out_path(cfg, name), content);
    man.files.push_back(name);
}

// ---- stages ---------------------------------------------------------------

calib::CalibResult stage_calibrate(const config::RunConfig& cfg, Manifest& man) {
    const calib::CalibResult res = calib::calibrate(cfg.targets, cfg.env, cfg.calib);
    emit(cfg, man, "calibration.json", artifacts::calib_json(res));
    emit(cfg, man, "calibration_table.csv", artifacts::calib_table_csv(res, cfg.targets));

    // Leave-one-out rows, one per dropped moment.
    std::ostringstream loo;
    loo.precision(10);
    loo << "dropped";
    for (const char* p : model::kParamNames) loo << ',' << p;
    loo << ",implied_delta_gini\n";
    for (int drop = 1; drop <= 6; ++drop) {
        const calib::CalibResult r = calib::leave_one_out_from(res, cfg.targets, cfg.env, cfg.calib, drop);
        loo << model::kMomentNames[drop - 1];
        for (double v : r.theta_hat.to_array()) loo << ',' << v;
        loo << ',' << r.derived.delta_gini << '\n';
    }
    emit(cfg, man, "leave_one_out.csv", loo.str());
    return res;
}

void stage_sensitivity(const config::RunConfig& cfg, const calib::CalibResult& at, Manifest& man) {
    const calib::SensitivityResult s = calib::sensitivity(at.theta_hat, cfg.targets, cfg.env, cfg.calib);
    emit(cfg, man, "sensitivity.json", artifacts::sensitivity_json(s));
    emit(cfg, man, "sensitivity.csv", artifacts::sensitivity_csv(s));
}

void stage_bootstrap(const config::RunConfig& cfg, Manifest& man) {
    const bootstrap::BootstrapResult res =
        cfg.bootstrap_augmented
            ? bootstrap::bootstrap_augmented(cfg.targets, cfg.env, cfg.calib, cfg.bootstrap)
            : bootstrap::bootstrap_standard(cfg.targets, cfg.env, cfg.calib, cfg.bootstrap);
    emit(cfg, man, "bootstrap_intervals.json", artifacts::bootstrap_intervals_json(res));
    emit(cfg, man, "bootstrap_replications.csv", bootstrap::replications_csv(res));
}

void stage_scenarios(const config::RunConfig& cfg, Manifest& man) {
    scenarios::SweepSpec spec;
    spec.base = cfg.base_params;
    spec.env = cfg.env;

    spec.param = scenarios::SweepParam::Xi;
    spec.grid = cfg.xi_grid;
    emit(cfg, man, "sweep_xi.csv", scenarios::sweep_csv(scenarios::run_sweep(spec)));

    spec.param = scenarios::SweepParam::Eta1;
    spec.grid = cfg.eta1_grid.empty()
                    ? std::vector<double>{0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45,
                                          0.50, 0.55, 0.60, 0.65}
                    : cfg.eta1_grid;
    emit(cfg, man, "sweep_eta1.csv", scenarios::sweep_csv(scenarios::run_sweep(spec)));

    spec.param = scenarios::SweepParam::GiniK;
    spec.grid = cfg.giniK_grid.empty()
                    ? std::vector<double>{0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95}
                    : cfg.giniK_grid;
    emit(cfg, man, "sweep_giniK.csv", scenarios::sweep_csv(scenarios::run_sweep(spec)));

    const auto industries = cfg.industries.empty()
                                ? scenarios::default_industries(cfg.base_params, cfg.env)
                                : cfg.industries;
    emit(cfg, man, "industry.csv",
         scenarios::industry_csv(scenarios::industry_table(cfg.base_params, cfg.env, industries)));

    const scenarios::ContourResult contour = scenarios::contour_grid(
        {cfg.contour.eta1_range[0], cfg.contour.eta1_range[1]},
        {cfg.contour.giniK_range[0], cfg.contour.giniK_range[1]}, cfg.contour.resolution,
        cfg.base_params, cfg.env);
    emit(cfg, man, "contour.csv", scenarios::contour_csv(contour));
}

void stage_simulate(const config::RunConfig& cfg, Manifest& man) {
    const auto rows = microsim::oracle_battery(cfg.base_params, cfg.env, cfg.microsim.n_workers,
                                               cfg.microsim.n_firms,
                                               derive_seed(cfg.seed, Stream::Microsim));
    emit(cfg, man, "microsim_oracle.csv", microsim::oracle_csv(rows));
}

void stage_regress(const config::RunConfig& cfg, Manifest& man) {
    const regress::MergeResult merged =
        regress::load_and_merge(cfg.regress.oews_2019, cfg.regress.oews_2023, cfg.regress.aioe);
    const auto table = regress::run_table4(merged.panel);
    emit(cfg, man, "regression_table.csv", regress::table_csv(table));
    emit(cfg, man, "regression_manifest.json",
         artifacts::regress_manifest_json(merged, regress::mean_fd_log_ratio(merged.panel)));
}

int run_command(const std::string& command, const Options& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const config::RunConfig cfg = load_config(opt);

    Manifest man;
    man.command = command;
    man.config_hash = config::fnv1a(config::canonical_json(cfg));
    man.seed = cfg.seed;
    man.threads = max_threads();

    if (command == "calibrate") {
        const calib::CalibResult res = stage_calibrate(cfg, man);
        std::cout << "calibrate: objective=" << res.objective << " p=" << res.p_value << '\n';
    } else if (command == "sensitivity") {
        const calib::CalibResult res = calib::calibrate(cfg.targets, cfg.env, cfg.calib);
        stage_sensitivity(cfg, res, man);
        std::cout << "sensitivity: written\n";
    } else if (command == "bootstrap") {
        stage_bootstrap(cfg, man);
        std::cout << "bootstrap: written\n";
    } else if (command == "scenarios") {
        stage_scenarios(cfg, man);
        std::cout << "scenarios: written\n";
    } else if (command == "simulate") {
        stage_simulate(cfg, man);
        std::cout << "simulate: written\n";
    } else if (command == "regress") {
        if (!cfg.regress.configured())
            throw std::runtime_error("regress: no input files configured (regress.oews_2019/oews_2023/aioe)");
        stage_regress(cfg, man);
        std::cout << "regress: written\n";
    } else if (command == "reproduce-all") {
        std::ostringstream report;
        report.precision(8);
        auto want = [&](const char* stage) { return opt.stage.empty() || opt.stage == stage; };

        std::optional<calib::CalibResult> fit;
        if (want("calibrate")) {
            fit = stage_calibrate(cfg, man);
            report << "calibrate: objective=" << fit->objective << " j=" << fit->j_stat
                   << " p=" << fit->p_value << "\n";
        }
        if (want("sensitivity")) {
            if (!fit) fit = calib::calibrate(cfg.targets, cfg.env, cfg.calib);
            stage_sensitivity(cfg, *fit, man);
            report << "sensitivity: written\n";
        }
        if (want("bootstrap")) {
            stage_bootstrap(cfg, man);
            report << "bootstrap: written\n";
        }
        if (want("scenarios")) {
            stage_scenarios(cfg, man);
            report << "scenarios: written (baseline from config base_params)\n";
        }
        if (want("simulate")) {
            stage_simulate(cfg, man);
            report << "simulate: oracle checks written\n";
        }
        if (want("regress")) {
            if (cfg.regress.configured() && std::filesystem::exists(cfg.regress.oews_2019) &&
                std::filesystem::exists(cfg.regress.oews_2023) &&
                std::filesystem::exists(cfg.regress.aioe)) {
                stage_regress(cfg, man);
                report << "regress: written\n";
            } else {
                report << "regress: skipped (input files not found)\n";
            }
        }
        emit(cfg, man, "report.txt", report.str());
        std::cout << report.str();
    } else {
        throw std::runtime_error("unknown command: " + command);
    }

    man.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    artifacts::write_file(out_path(cfg, "manifest.json"), man.dump());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural calibration toolkit for a two-channel model of AI and wage inequality"};
    app.set_version_flag("--version", kVersion);

    Options opt;
    app.add_option("--config", opt.config_path, "Run-configuration JSON file")
        ->envname("INEQCAL_CONFIG");
    app.add_option("--out", opt.out_dir, "Output directory (overrides config)")
        ->envname("INEQCAL_OUT");
    app.add_option("--seed", opt.seed, "Global seed (overrides config)")->envname("INEQCAL_SEED");
    app.add_option("--threads", opt.threads, "Worker threads, 0 = default")
        ->envname("INEQCAL_THREADS");
    app.add_option("--stage", opt.stage,
                   "Restrict reproduce-all to one stage "
                   "(calibrate|sensitivity|bootstrap|scenarios|simulate|regress)")
        ->envname("INEQCAL_STAGE");

    const std::vector<std::string> commands = {"calibrate", "bootstrap", "sensitivity",
                                               "scenarios", "simulate",  "regress",
                                               "reproduce-all"};
    std::string chosen;
    for (const std::string& c : commands) {
        CLI::App* sub = app.add_subcommand(c);
        sub->fallthrough();  // global flags may follow the command name
        sub->callback([&chosen, c]() { chosen = c; });
    }
    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        return run_command(chosen, opt);
    } catch (const ineq::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

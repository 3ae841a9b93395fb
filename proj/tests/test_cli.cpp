#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "ineq/config.hpp"

using namespace ineq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ineq_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = path / name;
        std::ofstream(p) << content;
        return p.string();
    }
};

struct RunOutcome {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunOutcome run_cli(const std::string& args, const fs::path& capture_dir) {
    const std::string log = (capture_dir / "cli_log.txt").string();
    const std::string cmd = std::string(INEQCAL_BIN) + " " + args + " >" + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunOutcome out;
    out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream buf;
    buf << in.rdbuf();
    out.output = buf.str();
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Small-budget config so CLI round trips stay fast.
std::string quick_config(const std::string& out_dir, const std::string& extra = "") {
    std::ostringstream os;
    os << "{\n"
       << "  \"seed\": 321,\n"
       << "  \"output_dir\": \"" << out_dir << "\",\n"
       << "  \"calib\": {\"de_population\": 24, \"de_generations\": 60, \"nm_starts\": 4},\n"
       << "  \"bootstrap\": {\"b\": 12},\n"
       << "  \"microsim\": {\"n_workers\": 20000, \"n_firms\": 500}" << (extra.empty() ? "" : ",")
       << extra << "\n}\n";
    return os.str();
}

} // namespace

TEST_CASE("config defaults carry the published baseline") {
    const config::RunConfig cfg;
    CHECK(cfg.targets.values[0] == doctest::Approx(0.35));
    CHECK(cfg.targets.values[5] == doctest::Approx(0.005));
    CHECK(cfg.env.cv_h == doctest::Approx(0.35));
    CHECK(cfg.env.xi == doctest::Approx(0.20));
    CHECK(cfg.base_params.r == doctest::Approx(0.526));
    CHECK(cfg.base_params.giniK == doctest::Approx(0.909));
    CHECK(cfg.calib.de_population == 60);
    CHECK(cfg.calib.nm_starts == 30);
    CHECK(cfg.bootstrap.b == 1000);
}

TEST_CASE("config schema rejects unknown keys with their path") {
    CHECK_THROWS_WITH_AS(config::parse("{\"xI\": 1}"), doctest::Contains("xI"),
                         config::ConfigError);
    CHECK_THROWS_WITH_AS(config::parse("{\"env\": {\"xI\": 0.2}}"), doctest::Contains("env.xI"),
                         config::ConfigError);
    CHECK_THROWS_WITH_AS(config::parse("{\"calib\": {\"de_pop\": 3}}"),
                         doctest::Contains("calib.de_pop"), config::ConfigError);
    CHECK_THROWS_WITH_AS(config::parse("{\"sweeps\": {\"xi_grid\": [0.3, 0.1]}}"),
                         doctest::Contains("xi_grid"), config::ConfigError);
    CHECK_THROWS_WITH_AS(config::parse("{\"targets\": {\"values\": [1, 2]}}"),
                         doctest::Contains("targets.values"), config::ConfigError);
    CHECK_THROWS_WITH_AS(config::parse("not json"), doctest::Contains("invalid JSON"),
                         config::ConfigError);
}

TEST_CASE("config round trip") {
    const std::string text = R"({
      "seed": 99,
      "threads": 2,
      "env": {"xi": 0.15},
      "targets": {"values": [0.3, 0.5, 0.3, 0.45, 0.02, 0.004]},
      "base_params": {"giniK": 0.8},
      "bootstrap": {"b": 7, "augmented": true},
      "industries": [{"label": "custom", "giniK": 0.5, "xi": 0.1}]
    })";
    const config::RunConfig cfg = config::parse(text);
    CHECK(cfg.seed == 99);
    CHECK(cfg.threads == 2);
    CHECK(cfg.env.xi == doctest::Approx(0.15));
    CHECK(cfg.targets.values[0] == doctest::Approx(0.3));
    CHECK(cfg.targets.ses[0] == doctest::Approx(0.05));  // defaults retained
    CHECK(cfg.base_params.giniK == doctest::Approx(0.8));
    CHECK(cfg.bootstrap_augmented);
    REQUIRE(cfg.bootstrap.xi_range.has_value());
    CHECK((*cfg.bootstrap.xi_range)[0] == doctest::Approx(0.07));
    REQUIRE(cfg.industries.size() == 1);
    CHECK(cfg.industries[0].label == "custom");

    // Canonical serialization is stable, so the manifest hash is too.
    CHECK(config::canonical_json(cfg) == config::canonical_json(config::parse(text)));
    CHECK(config::fnv1a("abc") != config::fnv1a("abd"));
}

TEST_CASE("cli rejects a bad config with exit code 2") {
    TempDir dir;
    const std::string cfg = dir.file("bad.json", "{\"xI\": 1}");
    const RunOutcome out = run_cli("scenarios --config " + cfg, dir.path);
    CHECK(out.exit_code == 2);
    CHECK(out.output.find("xI") != std::string::npos);
}

TEST_CASE("cli scenarios stage writes the fixed-header artifacts deterministically") {
    TempDir dir;
    const std::string out1 = (dir.path / "out1").string();
    const std::string out2 = (dir.path / "out2").string();
    const std::string cfg = dir.file("cfg.json", quick_config("unused"));

    const RunOutcome a = run_cli("scenarios --config " + cfg + " --out " + out1, dir.path);
    REQUIRE(a.exit_code == 0);
    const RunOutcome b = run_cli("scenarios --config " + cfg + " --out " + out2, dir.path);
    REQUIRE(b.exit_code == 0);

    for (const char* name : {"sweep_xi.csv", "sweep_eta1.csv", "sweep_giniK.csv", "industry.csv",
                             "contour.csv"}) {
        const std::string f1 = slurp(fs::path(out1) / name);
        CHECK_FALSE(f1.empty());
        CHECK(f1 == slurp(fs::path(out2) / name));
    }
    CHECK(slurp(fs::path(out1) / "sweep_xi.csv").rfind("param,value,delta_gini,regime", 0) == 0);

    // Manifests agree once the wall-time field is dropped.
    auto m1 = nlohmann::json::parse(slurp(fs::path(out1) / "manifest.json"));
    auto m2 = nlohmann::json::parse(slurp(fs::path(out2) / "manifest.json"));
    m1.erase("wall_time_s");
    m2.erase("wall_time_s");
    CHECK(m1 == m2);
}

TEST_CASE("cli calibrate writes result artifacts") {
    TempDir dir;
    const std::string out = (dir.path / "out").string();
    const std::string cfg = dir.file("cfg.json", quick_config("unused"));
    const RunOutcome r = run_cli("calibrate --config " + cfg + " --out " + out, dir.path);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(fs::path(out) / "calibration.json"));
    CHECK(j.contains("theta_hat"));
    CHECK(j["p_value"].get<double>() > 0.0);
    CHECK_FALSE(slurp(fs::path(out) / "calibration_table.csv").empty());
    CHECK_FALSE(slurp(fs::path(out) / "leave_one_out.csv").empty());
}

TEST_CASE("cli regress errors without inputs but reproduce-all skips them") {
    TempDir dir;
    const std::string out = (dir.path / "out").string();
    const std::string cfg = dir.file("cfg.json", quick_config("unused"));
    const RunOutcome direct = run_cli("regress --config " + cfg + " --out " + out, dir.path);
    CHECK(direct.exit_code == 1);

    const std::string cfg2 = dir.file(
        "cfg2.json", quick_config("unused",
                                  "\n  \"regress\": {\"oews_2019\": \"missing_a.csv\", "
                                  "\"oews_2023\": \"missing_b.csv\", \"aioe\": \"missing_c.csv\"}"));
    const RunOutcome all =
        run_cli("reproduce-all --config " + cfg2 + " --out " + out + " --stage regress", dir.path);
    CHECK(all.exit_code == 0);
    CHECK(slurp(fs::path(out) / "report.txt").find("skipped") != std::string::npos);
}

TEST_CASE("cli seed override changes stochastic artifacts") {
    TempDir dir;
    const std::string outa = (dir.path / "a").string();
    const std::string outb = (dir.path / "b").string();
    const std::string cfg = dir.file("cfg.json", quick_config("unused"));
    REQUIRE(run_cli("bootstrap --config " + cfg + " --out " + outa, dir.path).exit_code == 0);
    REQUIRE(run_cli("bootstrap --config " + cfg + " --out " + outb + " --seed 777", dir.path)
                .exit_code == 0);
    CHECK(slurp(fs::path(outa) / "bootstrap_replications.csv") !=
          slurp(fs::path(outb) / "bootstrap_replications.csv"));
}

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineq/bootstrap.hpp"
#include "ineq/calib.hpp"
#include "ineq/model.hpp"
#include "ineq/scenarios.hpp"

namespace ineq::config {

// Raised on any schema violation; `path` names the offending key.
struct ConfigError : std::runtime_error {
    std::string path;
    ConfigError(std::string p, const std::string& what)
        : std::runtime_error(what), path(std::move(p)) {}
};

struct ContourSpec {
    std::array<double, 2> eta1_range = {0.05, 0.65};
    std::array<double, 2> giniK_range = {0.20, 0.98};
    int resolution = 21;
};

struct MicrosimSpec {
    int n_workers = 100000;
    int n_firms = 1000;
};

struct RegressPaths {
    std::string oews_2019;
    std::string oews_2023;
    std::string aioe;
    bool configured() const { return !oews_2019.empty() && !oews_2023.empty() && !aioe.empty(); }
};

struct RunConfig {
    std::uint64_t seed = 20230526;
    int threads = 0;  // 0 = library default
    std::string output_dir = "out";

    model::MomentVector targets;
    model::FixedEnv env;
    model::StructuralParams base_params;  // scenario/sweep baseline
    calib::CalibConfig calib;
    bootstrap::BootstrapConfig bootstrap;
    bool bootstrap_augmented = false;

    std::vector<double> xi_grid = scenarios::default_xi_grid();
    std::vector<double> eta1_grid;
    std::vector<double> giniK_grid;
    ContourSpec contour;
    std::vector<scenarios::IndustrySpec> industries;  // empty = defaults

    MicrosimSpec microsim;
    RegressPaths regress;

    RunConfig();
};

// Parse and validate a config file. Unknown keys and out-of-range values
// raise ConfigError with the offending key path.
RunConfig load(const std::string& path);
RunConfig parse(const std::string& json_text);

// Canonical serialization (sorted keys) used for the manifest input hash.
std::string canonical_json(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& text);

} // namespace ineq::config

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ineq/calib.hpp"
#include "ineq/model.hpp"

namespace ineq::bootstrap {

struct BootstrapConfig {
    int b = 1000;
    std::uint64_t seed = 20230526;
    std::optional<std::array<double, 2>> xi_range;  // present = augmented draw
    double ci_level = 0.95;

    bool valid() const {
        if (b < 1 || !(ci_level > 0.0 && ci_level < 1.0)) return false;
        if (xi_range && !((*xi_range)[0] <= (*xi_range)[1])) return false;
        return true;
    }
};

struct Replication {
    int index = 0;
    std::array<double, 6> perturbed_targets{};
    double xi = 0.0;  // drawn value (augmented) or the fixed env value
    std::array<double, 5> theta{};
    double objective = 0.0;
    double delta_gini = 0.0;
    double wage_compression = 0.0;
    double profit_elasticity_post = 0.0;
    bool excluded = false;
};

struct Interval {
    std::string name;
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct BootstrapResult {
    std::vector<Interval> intervals;  // five parameters then derived quantities
    std::vector<Replication> replications;
    int excluded = 0;
    bool augmented = false;
    double ci_level = 0.95;
};

// Percentile bootstrap: perturb each target moment by an independent
// N(0, se^2) draw (m1..m4 clipped to [0,1]), re-calibrate with a reduced
// budget (DE generations halved, single NM polish), and collect percentile
// intervals. Deterministic under seed, replication streams keyed by index.
BootstrapResult bootstrap_standard(const model::MomentVector& targets, const model::FixedEnv& env,
                                   const calib::CalibConfig& calib_cfg,
                                   const BootstrapConfig& bs_cfg);

// As standard, plus a joint uniform xi draw per replication used in the m6
// model moment and the reported delta_gini.
BootstrapResult bootstrap_augmented(const model::MomentVector& targets, const model::FixedEnv& env,
                                    const calib::CalibConfig& calib_cfg,
                                    const BootstrapConfig& bs_cfg);

std::string replications_csv(const BootstrapResult& res);

} // namespace ineq::bootstrap

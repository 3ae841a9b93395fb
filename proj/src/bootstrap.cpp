#include "ineq/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ineq/parallel.hpp"
#include "ineq/rng.hpp"
#include "ineq/stats.hpp"

namespace ineq::bootstrap {

namespace {

// Reduced-budget re-calibration for one replication: halved DE stage and a
// single Nelder-Mead polish from the DE best.
calib::OptimResult cheap_calibrate(const model::MomentVector& targets, const model::FixedEnv& env,
                                   const calib::CalibConfig& cfg, std::uint64_t rep_seed) {
    const calib::Objective f = [&](const std::array<double, 5>& x) {
        return calib::msm_objective(x, targets, env, cfg.bounds);
    };
    calib::CalibConfig c = cfg;
    c.seed = rep_seed;
    const calib::OptimResult de =
        calib::differential_evolution(f, c.bounds, c.de_population,
                                      std::max(1, c.de_generations / 2), c.de_mutation,
                                      c.de_crossover, c.seed, /*force_serial=*/true);
    calib::OptimResult nm = calib::nelder_mead(f, de.x, c.bounds, c.nm_max_iter, c.nm_tolerance);
    if (de.fx < nm.fx) { nm.x = de.x; nm.fx = de.fx; }
    nm.evals += de.evals;
    return nm;
}

BootstrapResult run(const model::MomentVector& targets, const model::FixedEnv& env,
                    const calib::CalibConfig& calib_cfg, const BootstrapConfig& bs_cfg,
                    bool augmented) {
    if (!bs_cfg.valid()) throw std::domain_error("bootstrap: bad config");
    if (augmented && !bs_cfg.xi_range) throw std::domain_error("bootstrap_augmented: xi_range missing");

    BootstrapResult res;
    res.augmented = augmented;
    res.ci_level = bs_cfg.ci_level;
    res.replications.resize(static_cast<std::size_t>(bs_cfg.b));

    // Replications are independent jobs; each one derives its own draw
    // streams from (seed, index) so failures or thread counts elsewhere
    // cannot shift its randomness.
    parallel_for(bs_cfg.b, [&](std::ptrdiff_t r) {
        Replication& rep = res.replications[static_cast<std::size_t>(r)];
        rep.index = static_cast<int>(r);

        Rng moment_rng(derive_seed(bs_cfg.seed, Stream::Bootstrap, 2 * static_cast<std::uint64_t>(r)));
        Rng xi_rng(derive_seed(bs_cfg.seed, Stream::Bootstrap, 2 * static_cast<std::uint64_t>(r) + 1));

        model::MomentVector perturbed = targets;
        for (int i = 0; i < 6; ++i) {
            double v = targets.values[i] + targets.ses[i] * moment_rng.normal();
            if (i < 4) v = std::clamp(v, 0.0, 1.0);  // shares and ratios stay meaningful
            perturbed.values[i] = v;
        }
        rep.perturbed_targets = perturbed.values;

        model::FixedEnv env_r = env;
        if (augmented)
            env_r.xi = xi_rng.uniform((*bs_cfg.xi_range)[0], (*bs_cfg.xi_range)[1]);
        rep.xi = env_r.xi;

        const calib::OptimResult fit =
            cheap_calibrate(perturbed, env_r, calib_cfg,
                            derive_seed(bs_cfg.seed, Stream::Bootstrap,
                                        0xc0ffee00ULL + static_cast<std::uint64_t>(r)));
        rep.theta = fit.x;
        rep.objective = fit.fx;

        // Degenerate fit: non-finite output or a point stuck in the
        // out-of-bounds penalty region.
        bool ok = std::isfinite(fit.fx);
        for (int d = 0; d < 5; ++d)
            ok = ok && std::isfinite(fit.x[d]) &&
                 fit.x[d] >= calib_cfg.bounds.lo[d] - 1e-12 &&
                 fit.x[d] <= calib_cfg.bounds.hi[d] + 1e-12;
        if (!ok) {
            rep.excluded = true;
            return;
        }
        const auto p = model::StructuralParams::from_array(fit.x);
        const calib::DerivedQuantities d = calib::derived_at(p, env_r);
        rep.delta_gini = d.delta_gini;
        rep.wage_compression = d.wage_compression;
        rep.profit_elasticity_post = d.profit_elasticity_post;
    });

    for (const Replication& rep : res.replications)
        if (rep.excluded) ++res.excluded;

    // Point estimate for the interval table comes from the full-budget fit
    // on the unperturbed targets.
    const calib::CalibResult point = calib::calibrate(targets, env, calib_cfg);

    const double alpha = 1.0 - bs_cfg.ci_level;
    auto interval = [&](const std::string& name, double pt, auto&& getter) {
        std::vector<double> xs;
        xs.reserve(res.replications.size());
        for (const Replication& rep : res.replications)
            if (!rep.excluded) xs.push_back(getter(rep));
        Interval iv;
        iv.name = name;
        iv.point = pt;
        if (!xs.empty()) {
            iv.lo = stats::quantile(xs, alpha / 2.0);
            iv.hi = stats::quantile(std::move(xs), 1.0 - alpha / 2.0);
        }
        res.intervals.push_back(iv);
    };

    const auto pa = point.theta_hat.to_array();
    for (int j = 0; j < 5; ++j)
        interval(model::kParamNames[j], pa[j], [j](const Replication& r) { return r.theta[j]; });
    interval("delta_gini", point.derived.delta_gini,
             [](const Replication& r) { return r.delta_gini; });
    interval("wage_compression", point.derived.wage_compression,
             [](const Replication& r) { return r.wage_compression; });
    interval("profit_elasticity_post", point.derived.profit_elasticity_post,
             [](const Replication& r) { return r.profit_elasticity_post; });
    return res;
}

} // namespace

BootstrapResult bootstrap_standard(const model::MomentVector& targets, const model::FixedEnv& env,
                                   const calib::CalibConfig& calib_cfg,
                                   const BootstrapConfig& bs_cfg) {
    return run(targets, env, calib_cfg, bs_cfg, /*augmented=*/false);
}

BootstrapResult bootstrap_augmented(const model::MomentVector& targets, const model::FixedEnv& env,
                                    const calib::CalibConfig& calib_cfg,
                                    const BootstrapConfig& bs_cfg) {
    return run(targets, env, calib_cfg, bs_cfg, /*augmented=*/true);
}

std::string replications_csv(const BootstrapResult& res) {
    std::ostringstream os;
    os << "index";
    for (const char* m : model::kMomentNames) os << ",target_" << m;
    os << ",xi";
    for (const char* p : model::kParamNames) os << ',' << p;
    os << ",objective,delta_gini,wage_compression,profit_elasticity_post,excluded\n";
    os.precision(10);
    for (const Replication& r : res.replications) {
        os << r.index;
        for (double v : r.perturbed_targets) os << ',' << v;
        os << ',' << r.xi;
        for (double v : r.theta) os << ',' << v;
        os << ',' << r.objective << ',' << r.delta_gini << ',' << r.wage_compression << ','
           << r.profit_elasticity_post << ',' << (r.excluded ? 1 : 0) << '\n';
    }
    return os.str();
}

} // namespace ineq::bootstrap

#include "ineq/calib.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ineq/parallel.hpp"
#include "ineq/rng.hpp"
#include "ineq/stats.hpp"

namespace ineq::calib {

double msm_objective(const std::array<double, 5>& theta, const model::MomentVector& targets,
                     const model::FixedEnv& env, const model::ParamBounds& bounds) {
    double box_dist2 = 0.0;
    for (int i = 0; i < 5; ++i) {
        if (theta[i] < bounds.lo[i]) box_dist2 += (bounds.lo[i] - theta[i]) * (bounds.lo[i] - theta[i]);
        if (theta[i] > bounds.hi[i]) box_dist2 += (theta[i] - bounds.hi[i]) * (theta[i] - bounds.hi[i]);
        if (!std::isfinite(theta[i])) return 1e18;
    }
    if (box_dist2 > 0.0) return 1e12 + box_dist2;

    const auto m = model::moment_model(model::StructuralParams::from_array(theta), env);
    double obj = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double z = (targets.values[i] - m[i]) / targets.ses[i];
        obj += z * z;
    }
    return obj;
}

double j_pvalue(double j_stat, int df) {
    if (j_stat < 0.0 || df < 1) throw std::domain_error("j_pvalue: bad arguments");
    return stats::chi2_upper(j_stat, static_cast<double>(df));
}

OptimResult differential_evolution(const Objective& f, const model::ParamBounds& bounds,
                                   int population, int generations, double mutation,
                                   double crossover, std::uint64_t seed, bool force_serial) {
    const int np = population;
    std::vector<std::array<double, 5>> pop(np), next(np);
    std::vector<double> fit(np), next_fit(np);

    // Initial population, one counter-derived stream per slot.
    parallel_for(np, [&](std::ptrdiff_t i) {
        Rng rng(derive_seed(seed, Stream::Calib, 1000000 + static_cast<std::uint64_t>(i)));
        for (int d = 0; d < 5; ++d) pop[i][d] = rng.uniform(bounds.lo[d], bounds.hi[d]);
        fit[i] = f(pop[i]);
    }, force_serial);

    OptimResult best;
    best.fx = fit[0];
    best.x = pop[0];
    for (int i = 1; i < np; ++i)
        if (fit[i] < best.fx) { best.fx = fit[i]; best.x = pop[i]; }
    best.evals = np;

    for (int gen = 0; gen < generations; ++gen) {
        parallel_for(np, [&](std::ptrdiff_t i) {
            Rng rng(derive_seed(seed, Stream::Calib,
                                (static_cast<std::uint64_t>(gen) << 24) ^ static_cast<std::uint64_t>(i)));
            // Three distinct partners, none equal to i.
            auto pick = [&](int avoid1, int avoid2, int avoid3) {
                int r;
                do {
                    r = static_cast<int>(rng.below(static_cast<std::uint64_t>(np)));
                } while (r == avoid1 || r == avoid2 || r == avoid3);
                return r;
            };
            const int r1 = pick(static_cast<int>(i), -1, -1);
            const int r2 = pick(static_cast<int>(i), r1, -1);
            const int r3 = pick(static_cast<int>(i), r1, r2);

            std::array<double, 5> trial = pop[i];
            const int jrand = static_cast<int>(rng.below(5));
            for (int d = 0; d < 5; ++d) {
                if (d == jrand || rng.uniform() < crossover) {
                    double v = pop[r1][d] + mutation * (pop[r2][d] - pop[r3][d]);
                    v = std::clamp(v, bounds.lo[d], bounds.hi[d]);
                    trial[d] = v;
                }
            }
            const double ft = f(trial);
            if (ft <= fit[i]) {
                next[i] = trial;
                next_fit[i] = ft;
            } else {
                next[i] = pop[i];
                next_fit[i] = fit[i];
            }
        }, force_serial);
        pop.swap(next);
        fit.swap(next_fit);
        best.evals += np;
        for (int i = 0; i < np; ++i)
            if (fit[i] < best.fx) { best.fx = fit[i]; best.x = pop[i]; }
    }
    return best;
}

OptimResult nelder_mead(const Objective& f, const std::array<double, 5>& start,
                        const model::ParamBounds& bounds, int max_iter, double tolerance) {
    constexpr int n = 5;
    using Point = std::array<double, n>;
    std::vector<Point> simplex(n + 1, start);
    std::vector<double> fv(n + 1);

    for (int d = 0; d < n; ++d) {
        double h = 0.05 * (bounds.hi[d] - bounds.lo[d]);
        if (start[d] + h > bounds.hi[d]) h = -h;
        simplex[d + 1][d] += h;
    }
    OptimResult out;
    for (int i = 0; i <= n; ++i) {
        fv[i] = f(simplex[i]);
        ++out.evals;
    }

    auto order = [&]() {
        std::array<int, n + 1> idx{};
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        std::vector<Point> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (int i = 0; i <= n; ++i) { s2[i] = simplex[idx[i]]; f2[i] = fv[idx[i]]; }
        simplex.swap(s2);
        fv.swap(f2);
    };

    order();
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fv[n] - fv[0]) <= tolerance * (std::fabs(fv[0]) + tolerance)) break;

        Point centroid{};
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < n; ++d) centroid[d] += simplex[i][d] / n;

        auto blend = [&](double coef) {
            Point p;
            for (int d = 0; d < n; ++d) p[d] = centroid[d] + coef * (simplex[n][d] - centroid[d]);
            return p;
        };

        const Point refl = blend(-1.0);
        const double f_refl = f(refl);
        ++out.evals;
        if (f_refl < fv[0]) {
            const Point expd = blend(-2.0);
            const double f_expd = f(expd);
            ++out.evals;
            if (f_expd < f_refl) { simplex[n] = expd; fv[n] = f_expd; }
            else { simplex[n] = refl; fv[n] = f_refl; }
        } else if (f_refl < fv[n - 1]) {
            simplex[n] = refl;
            fv[n] = f_refl;
        } else {
            const bool outside = f_refl < fv[n];
            const Point contr = blend(outside ? -0.5 : 0.5);
            const double f_contr = f(contr);
            ++out.evals;
            if (f_contr < std::min(f_refl, fv[n])) {
                simplex[n] = contr;
                fv[n] = f_contr;
            } else {
                // Shrink toward the best vertex.
                for (int i = 1; i <= n; ++i) {
                    for (int d = 0; d < n; ++d)
                        simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
                    fv[i] = f(simplex[i]);
                    ++out.evals;
                }
            }
        }
        order();
    }
    out.x = simplex[0];
    out.fx = fv[0];
    return out;
}

DerivedQuantities derived_at(const model::StructuralParams& p, const model::FixedEnv& env) {
    DerivedQuantities d;
    d.delta_gini = model::delta_gini(p, env).value;
    d.wage_compression = model::wage_compression(p.r, env.s_share);
    d.profit_elasticity_pre = model::profit_elasticity(p.eta0, env.gamma_l);
    d.profit_elasticity_post = model::profit_elasticity(p.eta1, env.gamma_l);
    return d;
}

namespace {

CalibResult make_result(const std::array<double, 5>& x, double fx,
                        const model::MomentVector& targets, const model::FixedEnv& env) {
    (void)targets;
    CalibResult res;
    res.theta_hat = model::StructuralParams::from_array(x);
    res.objective = fx;
    res.j_stat = fx;
    res.j_df = 1;  // 6 moments - 5 parameters
    res.p_value = j_pvalue(fx, res.j_df);
    res.model_moments = model::moment_model(res.theta_hat, env);
    res.derived = derived_at(res.theta_hat, env);
    res.nu_clamped = model::delta_gini(res.theta_hat, env).nu_clamped;
    return res;
}

// Multi-start Nelder-Mead refinement; start 0 is the incumbent, the rest are
// jitters around it and fresh draws from the box. Deterministic and
// independent of evaluation order (indexed results, serial argmin).
OptimResult refine(const Objective& f, const std::array<double, 5>& incumbent, double f_incumbent,
                   const model::ParamBounds& bounds, const CalibConfig& cfg,
                   std::uint64_t seed_salt) {
    const int ns = cfg.nm_starts;
    std::vector<std::array<double, 5>> starts(ns, incumbent);
    Rng rng(derive_seed(cfg.seed, Stream::Calib, 0xfeed0000 + seed_salt));
    for (int k = 1; k < ns; ++k) {
        if (k % 2 == 1) {
            for (int d = 0; d < 5; ++d) {
                const double span = bounds.hi[d] - bounds.lo[d];
                starts[k][d] =
                    std::clamp(incumbent[d] + 0.10 * span * rng.normal(), bounds.lo[d], bounds.hi[d]);
            }
        } else {
            for (int d = 0; d < 5; ++d) starts[k][d] = rng.uniform(bounds.lo[d], bounds.hi[d]);
        }
    }

    std::vector<OptimResult> results(ns);
    parallel_for(ns, [&](std::ptrdiff_t k) {
        results[k] = nelder_mead(f, starts[k], bounds, cfg.nm_max_iter, cfg.nm_tolerance);
    });

    OptimResult best;
    best.x = incumbent;
    best.fx = f_incumbent;
    for (const OptimResult& r : results) {
        best.evals += r.evals;
        if (r.fx < best.fx) { best.fx = r.fx; best.x = r.x; }
    }
    return best;
}

} // namespace

CalibResult calibrate(const model::MomentVector& targets, const model::FixedEnv& env,
                      const CalibConfig& cfg) {
    if (!cfg.valid()) throw std::domain_error("calibrate: bad config");
    if (!targets.valid()) throw std::domain_error("calibrate: bad targets");
    const Objective f = [&](const std::array<double, 5>& x) {
        return msm_objective(x, targets, env, cfg.bounds);
    };
    const OptimResult de = differential_evolution(f, cfg.bounds, cfg.de_population,
                                                  cfg.de_generations, cfg.de_mutation,
                                                  cfg.de_crossover, cfg.seed);
    const OptimResult best = refine(f, de.x, de.fx, cfg.bounds, cfg, 0);
    return make_result(best.x, best.fx, targets, env);
}

SensitivityResult sensitivity(const model::StructuralParams& theta_hat,
                              const model::MomentVector& targets, const model::FixedEnv& env,
                              const CalibConfig& cfg) {
    SensitivityResult out;
    const std::array<double, 5> t0 = theta_hat.to_array();

    auto moments_at = [&](const std::array<double, 5>& x) {
        return model::moment_model(model::StructuralParams::from_array(x), env);
    };
    auto dgini_at = [&](const std::array<double, 5>& x) {
        return model::delta_gini(model::StructuralParams::from_array(x), env).value;
    };

    std::array<double, 5> step{};
    for (int j = 0; j < 5; ++j) step[j] = cfg.fd_step * std::max(std::fabs(t0[j]), 1e-3);

    std::array<double, 5> dgrad{};  // d delta_gini / d theta_j
    for (int j = 0; j < 5; ++j) {
        std::array<double, 5> hi = t0, lo = t0;
        hi[j] += step[j];
        lo[j] -= step[j];
        const auto mh = moments_at(hi);
        const auto ml = moments_at(lo);
        for (int i = 0; i < 6; ++i) out.jacobian[i][j] = (mh[i] - ml[i]) / (2.0 * step[j]);
        dgrad[j] = (dgini_at(hi) - dgini_at(lo)) / (2.0 * step[j]);
    }

    Eigen::Matrix<double, 6, 5> G;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j) G(i, j) = out.jacobian[i][j];
    Eigen::Matrix<double, 6, 6> W = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 6; ++i) W(i, i) = 1.0 / (targets.ses[i] * targets.ses[i]);

    const Eigen::Matrix<double, 5, 5> A = G.transpose() * W * G;
    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 5>> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    out.rcond = sv(4) / sv(0);
    out.singular = !(out.rcond > 1e-9);
    if (out.singular) {
        // Right singular vector of the smallest singular value: the parameter
        // combination the moments cannot distinguish.
        std::ostringstream desc;
        desc << "weakly identified direction:";
        for (int j = 0; j < 5; ++j) {
            out.deficient_direction[j] = svd.matrixV()(j, 4);
            if (std::fabs(out.deficient_direction[j]) > 0.05)
                desc << ' ' << (out.deficient_direction[j] >= 0 ? '+' : '-')
                     << std::fabs(out.deficient_direction[j]) << '*' << model::kParamNames[j];
        }
        out.deficient_description = desc.str();
    }

    // Pseudo-inverse via the SVD keeps S usable when A is rank-deficient; the
    // singular flag and direction report the degeneracy alongside.
    Eigen::Matrix<double, 5, 5> a_pinv = Eigen::Matrix<double, 5, 5>::Zero();
    for (int k = 0; k < 5; ++k) {
        if (sv(k) > 1e-12 * sv(0))
            a_pinv += svd.matrixV().col(k) * svd.matrixU().col(k).transpose() / sv(k);
    }
    const Eigen::Matrix<double, 5, 6> S = a_pinv * G.transpose() * W;

    const auto m0 = moments_at(t0);
    const double dg0 = dgini_at(t0);
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 6; ++i) {
            out.S[j][i] = S(j, i);
            out.elasticities[j][i] = S(j, i) * m0[i] / t0[j];
        }
    }
    for (int i = 0; i < 6; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 5; ++j) acc += dgrad[j] * S(j, i);
        out.boundary[i] = acc * targets.ses[i];
    }
    for (int j = 0; j < 5; ++j) {
        out.direct[j] = dgrad[j];
        out.direct_elasticities[j] = dg0 != 0.0 ? dgrad[j] * t0[j] / dg0 : 0.0;
    }
    {
        const double h = cfg.fd_step * std::max(env.xi, 1e-3);
        const model::StructuralParams p = theta_hat;
        const double up = model::delta_gini(p, env, env.xi + h).value;
        const double dn = model::delta_gini(p, env, env.xi - h).value;
        out.direct[5] = (up - dn) / (2.0 * h);
        out.direct_elasticities[5] = dg0 != 0.0 ? out.direct[5] * env.xi / dg0 : 0.0;
    }
    return out;
}

CalibResult leave_one_out_from(const CalibResult& full, const model::MomentVector& targets,
                               const model::FixedEnv& env, const CalibConfig& cfg,
                               int drop_index) {
    if (drop_index < 1 || drop_index > 6) throw std::domain_error("leave_one_out: drop_index outside 1..6");
    const int drop = drop_index - 1;
    const Objective f = [&, drop](const std::array<double, 5>& x) {
        double box_dist2 = 0.0;
        for (int i = 0; i < 5; ++i) {
            if (x[i] < cfg.bounds.lo[i]) box_dist2 += (cfg.bounds.lo[i] - x[i]) * (cfg.bounds.lo[i] - x[i]);
            if (x[i] > cfg.bounds.hi[i]) box_dist2 += (x[i] - cfg.bounds.hi[i]) * (x[i] - cfg.bounds.hi[i]);
        }
        if (box_dist2 > 0.0) return 1e12 + box_dist2;
        const auto m = model::moment_model(model::StructuralParams::from_array(x), env);
        double obj = 0.0;
        for (int i = 0; i < 6; ++i) {
            if (i == drop) continue;
            const double z = (targets.values[i] - m[i]) / targets.ses[i];
            obj += z * z;
        }
        return obj;
    };
    // Local refinement around the full-sample point: the dropped-moment refit
    // stays in the incumbent basin rather than re-running the global stage.
    const std::array<double, 5> x0 = full.theta_hat.to_array();
    const OptimResult best = refine(f, x0, f(x0), cfg.bounds, cfg, 0xb00 + static_cast<std::uint64_t>(drop));

    CalibResult res;
    res.theta_hat = model::StructuralParams::from_array(best.x);
    res.objective = best.fx;
    res.j_stat = best.fx;
    res.j_df = 0;  // exactly identified: no overidentification test
    res.p_value = 1.0;
    res.model_moments = model::moment_model(res.theta_hat, env);
    res.derived = derived_at(res.theta_hat, env);
    res.nu_clamped = model::delta_gini(res.theta_hat, env).nu_clamped;
    return res;
}

CalibResult leave_one_out(const model::MomentVector& targets, const model::FixedEnv& env,
                          const CalibConfig& cfg, int drop_index) {
    const CalibResult full = calibrate(targets, env, cfg);
    return leave_one_out_from(full, targets, env, cfg, drop_index);
}

} // namespace ineq::calib

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ineq/model.hpp"

namespace ineq::calib {

struct CalibConfig {
    int de_population = 60;
    int de_generations = 400;
    double de_mutation = 0.7;
    double de_crossover = 0.9;
    int nm_starts = 30;
    int nm_max_iter = 2000;
    double nm_tolerance = 1e-10;
    double fd_step = 1e-4;  // relative finite-difference step
    std::uint64_t seed = 20230526;
    model::ParamBounds bounds;

    bool valid() const {
        return de_population > 3 && de_generations >= 1 && de_mutation > 0.0 &&
               de_crossover > 0.0 && de_crossover <= 1.0 && nm_starts >= 1 && nm_max_iter >= 1 &&
               nm_tolerance > 0.0 && fd_step > 0.0;
    }
};

struct DerivedQuantities {
    double delta_gini = 0.0;
    double wage_compression = 0.0;
    double profit_elasticity_pre = 0.0;
    double profit_elasticity_post = 0.0;
};

struct CalibResult {
    model::StructuralParams theta_hat;
    double objective = 0.0;
    double j_stat = 0.0;
    double p_value = 1.0;
    int j_df = 1;
    std::array<double, 6> model_moments{};
    DerivedQuantities derived;
    bool nu_clamped = false;
};

// Weighted MSM distance with W = diag(1/se^2). Out-of-bounds points get a
// large smooth penalty instead of an exception so search never aborts.
double msm_objective(const std::array<double, 5>& theta, const model::MomentVector& targets,
                     const model::FixedEnv& env, const model::ParamBounds& bounds);

// Upper-tail chi-squared p-value of the J statistic.
double j_pvalue(double j_stat, int df);

// Two-step estimator: global differential evolution, then Nelder-Mead
// refinement from nm_starts points seeded by the DE best. Deterministic
// under cfg.seed and independent of thread count.
CalibResult calibrate(const model::MomentVector& targets, const model::FixedEnv& env,
                      const CalibConfig& cfg);

// Moment-parameter sensitivity at a calibrated point.
struct SensitivityResult {
    // G[i][j] = d m_i / d theta_j (6 x 5, central differences).
    std::array<std::array<double, 5>, 6> jacobian{};
    // S[j][i] = (G'WG)^-1 G'W, parameter response to moment perturbations.
    std::array<std::array<double, 6>, 5> S{};
    std::array<std::array<double, 6>, 5> elasticities{};
    // Boundary diagnostic: change in delta_gini per +1 SE of each moment.
    std::array<double, 6> boundary{};
    // Direct derivatives of delta_gini: the five parameters, then xi.
    std::array<double, 6> direct{};
    std::array<double, 6> direct_elasticities{};
    bool singular = false;
    double rcond = 0.0;
    // Unit direction of the weakest-identified parameter combination and a
    // printable description, populated when singular.
    std::array<double, 5> deficient_direction{};
    std::string deficient_description;
};

SensitivityResult sensitivity(const model::StructuralParams& theta_hat,
                              const model::MomentVector& targets, const model::FixedEnv& env,
                              const CalibConfig& cfg);

// Re-calibrate on five moments after dropping drop_index (1-based). The
// refit is a local multi-start refinement around the full-sample estimate.
CalibResult leave_one_out(const model::MomentVector& targets, const model::FixedEnv& env,
                          const CalibConfig& cfg, int drop_index);

// Same, but starting from an already computed full-sample result (saves the
// repeated global stage when the caller has one).
CalibResult leave_one_out_from(const CalibResult& full, const model::MomentVector& targets,
                               const model::FixedEnv& env, const CalibConfig& cfg, int drop_index);

// ---- optimizer building blocks (exposed for tests and for the benchmark) --

using Objective = std::function<double(const std::array<double, 5>&)>;

struct OptimResult {
    std::array<double, 5> x{};
    double fx = 0.0;
    std::int64_t evals = 0;
};

// DE/rand/1/bin over a box, synchronous generations, per-candidate
// counter-based RNG. force_serial switches off the OpenMP evaluation loop.
OptimResult differential_evolution(const Objective& f, const model::ParamBounds& bounds,
                                   int population, int generations, double mutation,
                                   double crossover, std::uint64_t seed,
                                   bool force_serial = false);

OptimResult nelder_mead(const Objective& f, const std::array<double, 5>& start,
                        const model::ParamBounds& bounds, int max_iter, double tolerance);

// Derived quantities at a parameter point.
DerivedQuantities derived_at(const model::StructuralParams& p, const model::FixedEnv& env);

} // namespace ineq::calib

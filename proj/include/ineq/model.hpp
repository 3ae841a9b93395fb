#pragma once

#include <array>
#include <optional>
#include <string>

namespace ineq::model {

// The five calibrated parameters of the two-channel model.
struct StructuralParams {
    double r = 0.526;      // AI-to-human output ratio alpha/(phi*mu_h)
    double sigma = 1.166;  // task substitution elasticity
    double eta0 = 0.142;   // pre-AI asset elasticity
    double eta1 = 0.323;   // post-AI asset elasticity
    double giniK = 0.909;  // Gini of the asset distribution

    std::array<double, 5> to_array() const { return {r, sigma, eta0, eta1, giniK}; }
    static StructuralParams from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
    bool valid() const;
};

inline constexpr std::array<const char*, 5> kParamNames = {"r", "sigma", "eta0", "eta1", "giniK"};

// Calibration search box. The bounds double as the validity region for
// bootstrap draws and sweep specs.
struct ParamBounds {
    std::array<double, 5> lo = {0.05, 0.2, 0.05, 0.05, 0.2};
    std::array<double, 5> hi = {1.5, 5.0, 0.8, 0.9, 0.98};

    bool contains(const std::array<double, 5>& x) const {
        for (int i = 0; i < 5; ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

// Fixed parameters and anchors held outside the calibration.
struct FixedEnv {
    double cv_h = 0.35;       // within-occupation ability CV
    double s_share = 0.50;    // AI-augmentable task share |S|
    double gamma_l = 0.55;    // labor share
    double xi = 0.20;         // rent-sharing elasticity
    double m3_anchor = 0.30;  // pre-AI within-firm variance share
    double sigma_eps = 0.35;  // screening signal noise sd
    double top_q = 0.04;      // top-firm fraction for the concentration moment
    double a_norm = 1.0;      // post-AI capability level (pre is 0)

    bool valid() const;
};

// Task-level production technology: y = h*phi*(1 + beta*a) + alpha*a.
struct TaskTech {
    double phi = 1.0;
    double alpha = 0.526;
    double beta = 0.0;
    double mu_h = 1.0;
    double sigma_h = 0.35;

    bool valid() const;
};

// Six target moments with standard errors and the default targets.
struct MomentVector {
    std::array<double, 6> values = {0.35, 0.50, 0.30, 0.45, 0.025, 0.005};
    std::array<double, 6> ses = {0.05, 0.08, 0.03, 0.05, 0.01, 0.005};

    bool valid() const;
};

inline constexpr std::array<const char*, 6> kMomentNames = {"m1_cv_reduction",
                                                            "m2_gap_compression",
                                                            "m3_within_share",
                                                            "m4_top_share",
                                                            "m5_edu_premium_decline",
                                                            "m6_delta_gini"};

enum class Regime { Equalizing, Concentrating, Boundary };

const char* regime_name(Regime r);

// Outcome of the channel comparison: lhs is the between-firm variance gain,
// rhs the within-channel variance loss.
struct RegimeOutcome {
    double lhs = 0.0;
    double rhs = 0.0;
    double delta_gini = 0.0;
    Regime regime = Regime::Boundary;
};

struct HomogenizationResult {
    bool holds = false;
    double margin = 0.0;  // lhs / rhs of the dominance condition
    bool degenerate = false;  // alpha = beta = 0 (no AI at all)
};

struct DeltaGiniResult {
    double value = 0.0;
    double nu = 0.0;          // residual between-firm variance from the anchor
    bool nu_clamped = false;  // anchor infeasible, nu clamped to 0
    double var_pre = 0.0;     // total pre-AI log-wage variance
    double var_post = 0.0;
};

struct RateComparison {
    double equalizing = 0.0;
    double concentrating = 0.0;
    double ratio = 0.0;  // concentrating / equalizing
};

// ---- closed forms -------------------------------------------------------

// Within-task output CV at capability a: phi*sigma_h / (phi*mu_h + alpha*a).
double cv_task(const TaskTech& tech, double a);

// Fractional CV reduction from the additive AI floor: 1 - 1/(1+r).
double cv_reduction(double r);

// Dominance condition for the additive channel under partial complementarity
// beta > 0; homogenization holds iff the margin exceeds 1.
HomogenizationResult homogenization_holds(const TaskTech& tech, double cv_h, double a);

// Screening signal reliability rho(a) in (0,1), decreasing in a when alpha > 0.
double reliability(const TaskTech& tech, double a, double sigma_eps);

// Effective capital elasticity of the two-channel production mix,
// (eta0*T + psi*R)/(T + R) with T = k^eta0 * l^gamma, R = delta_scale*a*k^psi.
// Evaluated in log space so extreme k cannot overflow.
double effective_eta(double a, double k, double l, double eta0, double psi, double gamma,
                     double delta_scale);

// Profit (and revenue) elasticity with respect to assets: eta/(1-gamma_l).
double profit_elasticity(double eta, double gamma_l);
bool self_reinforcing(double eta, double gamma_l);

// Pooled wage-dispersion ratio post/pre: 1/(1 + s_share*r).
double wage_compression(double r, double s_share);

// CES task price response to an output change: p_ratio = y_ratio^(-1/sigma).
double ces_price_response(double sigma, double y_ratio);

// Channel comparison at the post-AI level. lhs and rhs are the same variance
// quantities delta_gini aggregates, so sign(lhs-rhs) == sign(delta_gini).
RegimeOutcome knife_edge(const StructuralParams& p, const FixedEnv& env);

// Signed change in the aggregate Gini between the pre- and post-AI economies.
DeltaGiniResult delta_gini(const StructuralParams& p, const FixedEnv& env,
                           std::optional<double> xi_override = std::nullopt);

// The six model moments at theta.
std::array<double, 6> moment_model(const StructuralParams& p, const FixedEnv& env);

// Growth rates of the two channels at a = 1 along the linear capability path
// eta(a) = eta0 + (eta1 - eta0)*a.
RateComparison rate_comparison(const StructuralParams& p, const FixedEnv& env);

} // namespace ineq::model

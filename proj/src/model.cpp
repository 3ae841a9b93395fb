#include "ineq/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ineq/stats.hpp"

namespace ineq::model {

namespace {
bool finite(double x) { return std::isfinite(x); }
} // namespace

bool StructuralParams::valid() const {
    return finite(r) && finite(sigma) && finite(eta0) && finite(eta1) && finite(giniK) &&
           r >= 0.0 && sigma > 0.0 && eta0 > 0.0 && eta0 < 1.0 && eta1 > 0.0 && eta1 < 1.0 &&
           giniK > 0.0 && giniK < 1.0;
}

bool FixedEnv::valid() const {
    auto share = [](double x) { return finite(x) && x > 0.0 && x < 1.0; };
    return share(cv_h) && finite(s_share) && s_share >= 0.0 && s_share <= 1.0 &&
           share(gamma_l) && finite(xi) && xi >= 0.0 && share(m3_anchor) && sigma_eps > 0.0 &&
           share(top_q) && a_norm >= 0.0;
}

bool TaskTech::valid() const {
    return finite(phi) && phi > 0.0 && finite(alpha) && alpha >= 0.0 && finite(beta) &&
           beta >= 0.0 && finite(mu_h) && mu_h > 0.0 && finite(sigma_h) && sigma_h >= 0.0;
}

bool MomentVector::valid() const {
    for (double v : values)
        if (!finite(v)) return false;
    for (double s : ses)
        if (!(finite(s) && s > 0.0)) return false;
    return true;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Equalizing: return "Equalizing";
        case Regime::Concentrating: return "Concentrating";
        case Regime::Boundary: return "Boundary";
    }
    return "?";
}

double cv_task(const TaskTech& tech, double a) {
    const double mean = tech.phi * tech.mu_h + tech.alpha * a;
    if (mean <= 0.0) throw std::domain_error("cv_task: non-positive mean output");
    return tech.phi * tech.sigma_h / mean;
}

double cv_reduction(double r) {
    if (r < 0.0) throw std::domain_error("cv_reduction: r < 0");
    return r / (1.0 + r);
}

HomogenizationResult homogenization_holds(const TaskTech& tech, double cv_h, double a) {
    HomogenizationResult res;
    if (tech.beta == 0.0) {
        // Purely additive channel: homogenization is unconditional when AI
        // contributes anything at all.
        res.holds = true;
        res.margin = std::numeric_limits<double>::infinity();
        res.degenerate = (tech.alpha == 0.0);
        return res;
    }
    const double lhs = tech.alpha / (tech.beta * tech.phi * tech.mu_h);
    const double scale = 1.0 + tech.beta * a;
    const double rhs = cv_h * scale / (1.0 + cv_h * cv_h * scale * scale);
    res.margin = lhs / rhs;
    res.holds = lhs > rhs;
    return res;
}

double reliability(const TaskTech& tech, double a, double sigma_eps) {
    if (sigma_eps <= 0.0) throw std::domain_error("reliability: sigma_eps <= 0");
    const double ability_var = tech.phi * tech.phi * tech.sigma_h * tech.sigma_h;
    const double mean = tech.phi * tech.mu_h + tech.alpha * a;
    // Output variance is shift-invariant in a, so sigma_y^2 = phi^2 sigma_h^2.
    const double diagnostic = ability_var / (ability_var + mean * mean) * ability_var;
    return diagnostic / (diagnostic + sigma_eps * sigma_eps);
}

double effective_eta(double a, double k, double l, double eta0, double psi, double gamma,
                     double delta_scale) {
    if (k <= 0.0 || l <= 0.0 || delta_scale <= 0.0 || a < 0.0)
        throw std::domain_error("effective_eta: bad arguments");
    if (a == 0.0) return eta0;
    // Log-space evaluation keeps k^eta0 and k^psi from overflowing.
    const double t_log = eta0 * std::log(k) + gamma * std::log(l);
    const double r_log = std::log(delta_scale * a) + psi * std::log(k);
    const double m = std::max(t_log, r_log);
    const double t = std::exp(t_log - m);
    const double r = std::exp(r_log - m);
    return (eta0 * t + psi * r) / (t + r);
}

double profit_elasticity(double eta, double gamma_l) {
    if (!(gamma_l > 0.0 && gamma_l < 1.0)) throw std::domain_error("profit_elasticity: gamma_l outside (0,1)");
    return eta / (1.0 - gamma_l);
}

bool self_reinforcing(double eta, double gamma_l) {
    return profit_elasticity(eta, gamma_l) > 1.0;
}

double wage_compression(double r, double s_share) {
    if (r < 0.0 || s_share < 0.0 || s_share > 1.0)
        throw std::domain_error("wage_compression: bad arguments");
    return 1.0 / (1.0 + s_share * r);
}

double ces_price_response(double sigma, double y_ratio) {
    if (sigma <= 0.0 || y_ratio <= 0.0) throw std::domain_error("ces_price_response: bad arguments");
    return std::pow(y_ratio, -1.0 / sigma);
}

namespace {

// Shared variance components of the aggregation. The within-firm channel
// carries twice the task-weighted wage variance: the worker-dispersion term
// plus an equal-size sorting-covariance term, both of which compress with
// the AI floor. The between channel is the rent-sharing pass-through of log
// asset dispersion.
struct Channels {
    double w_pre;   // within + sorting covariance, pre-AI
    double w_post;  // same, post-AI
    double b0;      // rent-sharing between variance at eta0
    double b1;      // at eta1
};

Channels channels(const StructuralParams& p, const FixedEnv& env, double xi) {
    Channels c{};
    const double cv2 = env.cv_h * env.cv_h;
    const double comp2 = (1.0 - env.s_share) + env.s_share / ((1.0 + p.r) * (1.0 + p.r));
    c.w_pre = 2.0 * cv2;
    c.w_post = 2.0 * cv2 * comp2;
    const double var_log_k = std::pow(stats::gini_to_sigma(p.giniK), 2);
    const double xi2v = xi * xi * var_log_k;
    c.b0 = xi2v * std::pow(profit_elasticity(p.eta0, env.gamma_l), 2);
    c.b1 = xi2v * std::pow(profit_elasticity(p.eta1, env.gamma_l), 2);
    return c;
}

} // namespace

RegimeOutcome knife_edge(const StructuralParams& p, const FixedEnv& env) {
    const Channels c = channels(p, env, env.xi);
    RegimeOutcome out;
    out.lhs = c.b1 - c.b0;
    out.rhs = c.w_pre - c.w_post;  // = 2*|S|*CV_h^2*(1 - 1/(1+r)^2)
    out.delta_gini = delta_gini(p, env).value;
    const double gap = out.lhs - out.rhs;
    if (std::fabs(gap) <= 1e-9)
        out.regime = Regime::Boundary;
    else
        out.regime = gap > 0.0 ? Regime::Concentrating : Regime::Equalizing;
    return out;
}

DeltaGiniResult delta_gini(const StructuralParams& p, const FixedEnv& env,
                           std::optional<double> xi_override) {
    const double xi = xi_override.value_or(env.xi);
    const Channels c = channels(p, env, xi);
    DeltaGiniResult res;
    // Residual between-firm variance anchored so the pre-AI within share
    // equals m3_anchor.
    res.nu = c.w_pre * (1.0 - env.m3_anchor) / env.m3_anchor - c.b0;
    if (res.nu < 0.0) {
        res.nu = 0.0;
        res.nu_clamped = true;
    }
    res.var_pre = c.w_pre + res.nu + c.b0;
    res.var_post = c.w_post + res.nu + c.b1;
    res.value = stats::lognormal_gini(std::sqrt(res.var_post)) -
                stats::lognormal_gini(std::sqrt(res.var_pre));
    return res;
}

std::array<double, 6> moment_model(const StructuralParams& p, const FixedEnv& env) {
    if (p.sigma <= 0.0) throw std::domain_error("moment_model: sigma <= 0");
    std::array<double, 6> m{};
    m[0] = cv_reduction(p.r);

    // 90/10 productivity gap compression under lognormal h with mean 1.
    const double slog2 = std::log(1.0 + env.cv_h * env.cv_h);
    const double slog = std::sqrt(slog2);
    const double mlog = -0.5 * slog2;
    const double z90 = stats::norm_ppf(0.90);
    const double h90 = std::exp(mlog + z90 * slog);
    const double h10 = std::exp(mlog - z90 * slog);
    const double r_pre = h90 / h10;
    const double r_post = (h90 + p.r) / (h10 + p.r);
    m[1] = 1.0 - (r_post - 1.0) / (r_pre - 1.0);

    m[2] = env.m3_anchor;

    // Top-q revenue mass of a lognormal with log-sd c*sigma_K.
    const double sigma_k = stats::gini_to_sigma(p.giniK);
    const double c_post = profit_elasticity(p.eta1, env.gamma_l);
    m[3] = 1.0 - stats::norm_cdf(stats::norm_ppf(1.0 - env.top_q) - c_post * sigma_k);

    m[4] = env.s_share * (1.0 - 1.0 / p.sigma) * std::log(1.0 + p.r);

    m[5] = delta_gini(p, env).value;
    return m;
}

RateComparison rate_comparison(const StructuralParams& p, const FixedEnv& env) {
    RateComparison rc;
    // Equalizing channel: |S|*sigma_h^2/(1+r*a)^2 decelerating at a = 1.
    const double sigma_h2 = env.cv_h * env.cv_h;
    const double one_r = 1.0 + p.r;
    rc.equalizing = std::fabs(-2.0 * p.r * env.s_share * sigma_h2 / (one_r * one_r * one_r));
    // Concentrating channel: xi^2*Var(log K)*(eta(a)/(1-gamma_L))^2 at a = 1.
    const double var_log_k = std::pow(stats::gini_to_sigma(p.giniK), 2);
    const double inv = 1.0 / (1.0 - env.gamma_l);
    rc.concentrating =
        env.xi * env.xi * var_log_k * 2.0 * (p.eta1 * inv) * ((p.eta1 - p.eta0) * inv);
    rc.ratio = rc.equalizing > 0.0 ? rc.concentrating / rc.equalizing
                                   : std::numeric_limits<double>::infinity();
    return rc;
}

} // namespace ineq::model

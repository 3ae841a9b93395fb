#include "ineq/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ineq/rng.hpp"
#include "ineq/stats.hpp"

namespace ineq::microsim {

SimPopulation simulate_population(int n_workers, int n_firms, double cv_h, double giniK,
                                  std::uint64_t seed) {
    if (n_workers < 1 || n_firms < 1) throw std::domain_error("simulate_population: empty population");
    if (!(cv_h > 0.0) || !(giniK > 0.0 && giniK < 1.0))
        throw std::domain_error("simulate_population: bad cv_h or giniK");

    SimPopulation pop;
    pop.seed = seed;
    pop.workers.resize(static_cast<std::size_t>(n_workers));
    pop.firms.resize(static_cast<std::size_t>(n_firms));

    // Lognormal h with mean 1 and CV cv_h.
    const double slog2 = std::log(1.0 + cv_h * cv_h);
    const double slog = std::sqrt(slog2);
    const double mlog = -0.5 * slog2;
    const double sigma_k = stats::gini_to_sigma(giniK);

    Rng rng(derive_seed(seed, Stream::Microsim));
    for (std::size_t i = 0; i < pop.workers.size(); ++i) {
        Worker& w = pop.workers[i];
        w.h = std::exp(mlog + slog * rng.normal());
        w.theta = w.h;
        w.firm = static_cast<int>(i % pop.firms.size());
    }
    for (Firm& f : pop.firms) f.capital = std::exp(sigma_k * rng.normal());
    return pop;
}

double task_output_cv(const SimPopulation& pop, const model::TaskTech& tech, double a) {
    if (pop.workers.empty()) throw std::domain_error("task_output_cv: empty population");
    std::vector<double> y;
    y.reserve(pop.workers.size());
    const double gain = tech.phi * (1.0 + tech.beta * a);
    for (const Worker& w : pop.workers) y.push_back(w.h * gain + tech.alpha * a);
    return stats::cv(y);
}

EducationChoice education_choice(double theta, double phi_index, const EducationForms& forms,
                                 HumanCapitalForm form, double e_max) {
    if (theta <= 0.0 || phi_index < 0.0) throw std::domain_error("education_choice: bad arguments");
    EducationChoice out;
    // FOC residual: marginal benefit minus marginal cost. Multiplicative human
    // capital scales the benefit by theta and the cost by 1/theta; under the
    // additive form both theta factors drop and the choice is common.
    auto resid = [&](double e) {
        const double mb = forms.a_g * std::pow(1.0 + e, forms.a_g - 1.0) * phi_index;
        const double mc = 2.0 * forms.c0 * e;
        if (form == HumanCapitalForm::Multiplicative) return theta * mb - mc / theta;
        return mb - mc;
    };
    double lo = 0.0, hi = e_max;
    if (resid(hi) > 0.0 || phi_index == 0.0) {
        // No interior root (or no return at all): corner.
        out.e = phi_index == 0.0 ? 0.0 : e_max;
        out.corner = true;
        return out;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (resid(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    out.e = 0.5 * (lo + hi);
    return out;
}

ScreeningResult screening_equilibrium(const SimPopulation& pop, const model::TaskTech& tech,
                                      double a, double sigma_eps, double credential_cost_scale) {
    if (sigma_eps <= 0.0) throw std::domain_error("screening_equilibrium: sigma_eps <= 0");
    ScreeningResult res;
    res.rho = model::reliability(tech, a, sigma_eps);

    std::vector<double> thetas;
    thetas.reserve(pop.workers.size());
    for (const Worker& w : pop.workers) thetas.push_back(w.theta);
    std::sort(thetas.begin(), thetas.end());
    const std::size_t n = thetas.size();

    // Prefix sums let the threshold search evaluate group means in O(1).
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + thetas[i];

    // Wage gap if the marginal credential holder sits at sorted index k:
    // (1-rho) times the posterior-mean difference between groups.
    auto gap_at = [&](std::size_t k) {
        if (k == 0 || k >= n) return 0.0;
        const double below = prefix[k] / static_cast<double>(k);
        const double above = (prefix[n] - prefix[k]) / static_cast<double>(n - k);
        return (1.0 - res.rho) * (above - below);
    };

    // Separating threshold: gap(theta_hat) = cost_scale / theta_hat. The gap
    // is bounded while the cost explodes at low theta, so scan for the
    // lowest index where acquiring the credential breaks even.
    std::size_t k_hat = n;  // default: nobody
    for (std::size_t k = 1; k < n; ++k) {
        if (gap_at(k) >= credential_cost_scale / thetas[k]) {
            k_hat = k;
            break;
        }
    }
    if (k_hat == n) {
        res.clamped = true;
        res.theta_hat = thetas.back();
        res.wage_gap = gap_at(n - 1);
        res.credential_share = 0.0;
    } else {
        res.theta_hat = thetas[k_hat];
        res.wage_gap = gap_at(k_hat);
        res.credential_share = static_cast<double>(n - k_hat) / static_cast<double>(n);
    }

    // Monte Carlo check of the reliability weight: the slope of the
    // ability-driven output component on its noisy signal estimates rho.
    {
        Rng rng(derive_seed(pop.seed, Stream::Microsim, 0xabcdef));
        const double mean_y = tech.phi * stats::mean(thetas) + tech.alpha * a;
        const double var_y = tech.phi * tech.phi * stats::variance(thetas);
        const double vd = var_y / (var_y + mean_y * mean_y) * var_y;
        const double sd = std::sqrt(vd);
        double sxx = 0.0, sxy = 0.0;
        const int reps = 20000;
        for (int i = 0; i < reps; ++i) {
            const double d = sd * rng.normal();
            const double s = d + sigma_eps * rng.normal();
            sxx += s * s;
            sxy += s * d;
        }
        res.rho_empirical = sxy / sxx;
    }
    return res;
}

FirmDynamicsResult firm_dynamics(const SimPopulation& pop, const FirmDynamicsConfig& cfg,
                                 double eta, double gamma_l) {
    if (cfg.horizon < 1 || !(cfg.s >= 0.0 && cfg.s < 1.0) || !(cfg.delta >= 0.0 && cfg.delta < 1.0))
        throw std::domain_error("firm_dynamics: bad config");
    const double c = model::profit_elasticity(eta, gamma_l);

    std::vector<double> k;
    k.reserve(pop.firms.size());
    for (const Firm& f : pop.firms) k.push_back(f.capital);

    // Profit level constant pinning mean profit/capital at 0.1 initially.
    double mean_k = stats::mean(k);
    double mean_kc = 0.0;
    for (double v : k) mean_kc += std::pow(v, c);
    mean_kc /= static_cast<double>(k.size());
    const double c_pi = 0.1 * mean_k / mean_kc;

    FirmDynamicsResult res;
    auto var_log = [](const std::vector<double>& xs) {
        std::vector<double> logs;
        logs.reserve(xs.size());
        for (double v : xs) logs.push_back(std::log(v));
        return stats::variance(logs);
    };
    res.var_log_k.push_back(var_log(k));
    for (int t = 0; t < cfg.horizon; ++t) {
        for (double& v : k) {
            v = (1.0 - cfg.delta) * v + cfg.s * c_pi * std::pow(v, c);
            if (v > 1e300) {
                res.explosive = true;
                return res;
            }
        }
        res.var_log_k.push_back(var_log(k));
    }
    return res;
}

namespace {

VarianceDecomposition decompose(const std::vector<double>& premium, const std::vector<double>& wcomp) {
    VarianceDecomposition d;
    const double mp = stats::mean(premium);
    const double mw = stats::mean(wcomp);
    double vb = 0.0, vw = 0.0, cv_ = 0.0;
    const double n = static_cast<double>(premium.size());
    for (std::size_t i = 0; i < premium.size(); ++i) {
        const double dp = premium[i] - mp;
        const double dw = wcomp[i] - mw;
        vb += dp * dp;
        vw += dw * dw;
        cv_ += dp * dw;
    }
    d.between = vb / n;
    d.within = vw / n;
    d.cov_term = 2.0 * cv_ / n;
    d.total = d.between + d.within + d.cov_term;
    return d;
}

} // namespace

WageDecomposition wage_decomposition(const SimPopulation& pop, double xi, double theta_grad_pre,
                                     double theta_grad_post, double eta0, double eta1,
                                     double gamma_l, Matching matching, double sorting_post) {
    if (theta_grad_pre <= 0.0 || theta_grad_post <= 0.0)
        throw std::domain_error("wage_decomposition: gradients must be positive");
    if (!(sorting_post > 0.0 && sorting_post <= 1.0))
        throw std::domain_error("wage_decomposition: sorting_post outside (0,1]");
    const std::size_t n = pop.workers.size();
    const std::size_t m = pop.firms.size();

    std::vector<double> h_sorted;
    h_sorted.reserve(n);
    for (const Worker& w : pop.workers) h_sorted.push_back(w.h);
    std::sort(h_sorted.begin(), h_sorted.end());
    std::vector<double> logk_sorted;
    logk_sorted.reserve(m);
    for (const Firm& f : pop.firms) logk_sorted.push_back(std::log(f.capital));
    std::sort(logk_sorted.begin(), logk_sorted.end());
    if (matching == Matching::Random) {
        Rng rng(derive_seed(pop.seed, Stream::Microsim, 0x5f5f));
        std::shuffle(logk_sorted.begin(), logk_sorted.end(), rng.engine());
    }

    // Assignment of sorted workers to sorted firms. Full PAM pairs ranks
    // one for one; with sorting quality s < 1 the employer ranks workers on
    // a noisy gaussianized ability signal with correlation s.
    auto assignment = [&](double s, std::uint64_t salt) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        if (s < 1.0 && matching == Matching::Rank) {
            Rng rng(derive_seed(pop.seed, Stream::Microsim, 0x7a00 + salt));
            std::vector<std::pair<double, std::size_t>> keys(n);
            const double noise = std::sqrt(1.0 - s * s);
            for (std::size_t i = 0; i < n; ++i) {
                const double z = stats::norm_ppf((static_cast<double>(i) + 0.5) / n);
                keys[i] = {s * z + noise * rng.normal(), i};
            }
            std::sort(keys.begin(), keys.end());
            for (std::size_t rank = 0; rank < n; ++rank) order[rank] = keys[rank].second;
        }
        return order;  // order[rank] = index into h_sorted of the rank-th key
    };

    auto build = [&](double eta, double grad, const std::vector<std::size_t>& order) {
        std::vector<double> premium(n), wcomp(n);
        const double pass = xi * model::profit_elasticity(eta, gamma_l);
        for (std::size_t rank = 0; rank < n; ++rank) {
            const std::size_t j = rank * m / n;
            premium[order[rank]] = pass * logk_sorted[j];
            wcomp[order[rank]] = grad * h_sorted[order[rank]];
        }
        return decompose(premium, wcomp);
    };

    std::vector<std::size_t> identity(n);
    for (std::size_t i = 0; i < n; ++i) identity[i] = i;

    WageDecomposition out;
    out.pre = build(eta0, theta_grad_pre, identity);
    out.post = build(eta1, theta_grad_post, assignment(sorting_post, 1));
    return out;
}

std::vector<OracleRow> oracle_battery(const model::StructuralParams& p, const model::FixedEnv& env,
                                      int n_workers, int n_firms, std::uint64_t seed) {
    std::vector<OracleRow> rows;
    const SimPopulation pop = simulate_population(n_workers, n_firms, env.cv_h, p.giniK, seed);
    const auto n = static_cast<std::int64_t>(n_workers);

    auto push = [&](const std::string& name, std::int64_t count, double emp, double closed) {
        OracleRow row;
        row.check = name;
        row.seed = seed;
        row.n = count;
        row.empirical = emp;
        row.closed_form = closed;
        row.rel_error = closed != 0.0 ? std::fabs(emp - closed) / std::fabs(closed)
                                      : std::fabs(emp - closed);
        rows.push_back(row);
    };

    model::TaskTech tech{1.0, p.r, 0.0, 1.0, env.cv_h};
    push("cv_task_additive", n, task_output_cv(pop, tech, 1.0), model::cv_task(tech, 1.0));

    for (double beta : {0.25, 0.5}) {
        model::TaskTech tb = tech;
        tb.beta = beta;
        // Generalized CV: sd = phi*(1+beta)*sigma_h, mean = phi*(1+beta)*mu_h + alpha.
        const double scale = tb.phi * (1.0 + beta);
        const double closed = scale * tb.sigma_h / (scale * tb.mu_h + tb.alpha);
        push("cv_task_beta_" + std::to_string(beta).substr(0, 4), n, task_output_cv(pop, tb, 1.0),
             closed);
    }

    {
        // Gini oracle on the firm capital sample.
        std::vector<double> ks;
        ks.reserve(pop.firms.size());
        for (const Firm& f : pop.firms) ks.push_back(f.capital);
        push("gini_capital", static_cast<std::int64_t>(ks.size()), stats::empirical_gini(ks),
             p.giniK);
    }

    {
        const ScreeningResult s = screening_equilibrium(pop, tech, 1.0, env.sigma_eps, 0.05);
        push("reliability", n, s.rho_empirical, s.rho);
    }
    return rows;
}

std::string oracle_csv(const std::vector<OracleRow>& rows) {
    std::ostringstream os;
    os << "check,seed,n,empirical,closed_form,rel_error\n";
    os.precision(12);
    for (const OracleRow& r : rows)
        os << r.check << ',' << r.seed << ',' << r.n << ',' << r.empirical << ','
           << r.closed_form << ',' << r.rel_error << '\n';
    return os.str();
}

} // namespace ineq::microsim

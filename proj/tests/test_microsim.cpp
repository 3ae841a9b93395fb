#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ineq/microsim.hpp"
#include "ineq/stats.hpp"

using namespace ineq;
using namespace ineq::microsim;

namespace {
const model::FixedEnv kEnv;
}

TEST_CASE("population sampling is calibrated and deterministic") {
    const SimPopulation pop = simulate_population(100000, 200, 0.35, 0.909, 7);
    std::vector<double> h;
    h.reserve(pop.workers.size());
    for (const Worker& w : pop.workers) h.push_back(w.h);
    CHECK(stats::cv(h) == doctest::Approx(0.35).epsilon(0.01));
    CHECK(stats::mean(h) == doctest::Approx(1.0).epsilon(0.01));

    const SimPopulation again = simulate_population(100000, 200, 0.35, 0.909, 7);
    REQUIRE(again.workers.size() == pop.workers.size());
    for (std::size_t i = 0; i < 5000; ++i) {
        CHECK(again.workers[i].h == pop.workers[i].h);
        CHECK(again.workers[i].theta == pop.workers[i].theta);
    }
    for (std::size_t j = 0; j < pop.firms.size(); ++j)
        CHECK(again.firms[j].capital == pop.firms[j].capital);

    const SimPopulation other = simulate_population(1000, 10, 0.35, 0.909, 8);
    CHECK(other.workers[0].h != pop.workers[0].h);

    const SimPopulation tight = simulate_population(5000, 10, 1e-6, 0.5, 3);
    for (const Worker& w : tight.workers) CHECK(w.h == doctest::Approx(1.0).epsilon(1e-4));

    CHECK_THROWS_AS(simulate_population(0, 10, 0.35, 0.9, 1), std::domain_error);
}

TEST_CASE("task output CV matches the closed forms") {
    const SimPopulation pop = simulate_population(100000, 100, 0.35, 0.909, 11);
    model::TaskTech tech{1.0, 0.526, 0.0, 1.0, 0.35};

    const double emp = task_output_cv(pop, tech, 1.0);
    CHECK(std::fabs(emp - model::cv_task(tech, 1.0)) / model::cv_task(tech, 1.0) < 0.01);

    std::vector<double> h;
    for (const Worker& w : pop.workers) h.push_back(w.h);
    CHECK(task_output_cv(pop, tech, 0.0) == doctest::Approx(stats::cv(h)).epsilon(1e-12));

    for (double beta : {0.25, 0.5}) {
        model::TaskTech tb = tech;
        tb.beta = beta;
        const double scale = 1.0 + beta;
        const double closed = scale * 0.35 / (scale * 1.0 + 0.526);
        CHECK(std::fabs(task_output_cv(pop, tb, 1.0) - closed) / closed < 0.02);
    }
}

TEST_CASE("proportional AI gain falls with human capital") {
    const SimPopulation pop = simulate_population(50000, 100, 0.35, 0.909, 13);
    std::vector<double> h;
    for (const Worker& w : pop.workers) h.push_back(w.h);
    std::sort(h.begin(), h.end());
    // Quintile-mean proportional gains alpha*a/(h*phi) must decline.
    const std::size_t bin = h.size() / 5;
    double prev = 1e300;
    for (int q = 0; q < 5; ++q) {
        double acc = 0.0;
        for (std::size_t i = q * bin; i < (q + 1) * bin; ++i) acc += 0.526 / h[i];
        const double gain = acc / static_cast<double>(bin);
        CHECK(gain < prev);
        prev = gain;
    }
}

TEST_CASE("education choice") {
    EducationForms forms;
    // Vanishing task prices remove the return to education.
    const auto corner = education_choice(1.0, 0.0, forms);
    CHECK(corner.e == doctest::Approx(0.0));
    CHECK(corner.corner);

    const auto lo = education_choice(1.0, 0.5, forms);
    const auto hi = education_choice(1.0, 2.0, forms);
    CHECK_FALSE(lo.corner);
    CHECK(hi.e > lo.e);

    // Multiplicative human capital: abler workers study more.
    const auto e1 = education_choice(1.0, 1.0, forms);
    const auto e2 = education_choice(2.0, 1.0, forms);
    CHECK(e2.e > e1.e);

    // Additive human capital: the choice is common across ability.
    const auto a1 = education_choice(1.0, 1.0, forms, HumanCapitalForm::Additive);
    const auto a2 = education_choice(2.0, 1.0, forms, HumanCapitalForm::Additive);
    CHECK(a1.e == doctest::Approx(a2.e).epsilon(1e-10));

    CHECK_THROWS_AS(education_choice(0.0, 1.0, forms), std::domain_error);
}

TEST_CASE("screening equilibrium") {
    const SimPopulation pop = simulate_population(20000, 100, 0.35, 0.909, 17);
    model::TaskTech tech{1.0, 0.526, 0.0, 1.0, 0.35};

    // Perfect signal limit: reliability one, credentials carry no weight.
    const auto perfect = screening_equilibrium(pop, tech, 1.0, 1e-9, 0.05);
    CHECK(perfect.rho == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(perfect.wage_gap == doctest::Approx(0.0).epsilon(1e-4));

    double prev_share = -1.0;
    double prev_rho = 2.0;
    for (double a : {0.0, 0.5, 1.0}) {
        const auto s = screening_equilibrium(pop, tech, a, 0.35, 0.05);
        CHECK(s.rho < prev_rho);
        CHECK(s.credential_share >= prev_share);
        prev_rho = s.rho;
        prev_share = s.credential_share;
    }

    // Monte Carlo regression slope reproduces the reliability weight.
    const auto s = screening_equilibrium(pop, tech, 1.0, 0.35, 0.05);
    CHECK(std::fabs(s.rho_empirical - s.rho) / s.rho < 0.05);

    // Unreachable threshold clamps to the support edge.
    const auto clamped = screening_equilibrium(pop, tech, 1.0, 0.35, 1e9);
    CHECK(clamped.clamped);
    CHECK(clamped.credential_share == doctest::Approx(0.0));
}

TEST_CASE("firm dynamics variance direction") {
    const SimPopulation pop = simulate_population(100, 2000, 0.35, 0.75, 19);
    FirmDynamicsConfig cfg;
    cfg.horizon = 50;

    // Below the self-reinforcing threshold: non-increasing Var(log K).
    const auto contracting = firm_dynamics(pop, cfg, 0.323, 0.55);
    for (std::size_t t = 1; t < contracting.var_log_k.size(); ++t)
        CHECK(contracting.var_log_k[t] <= contracting.var_log_k[t - 1] + 1e-12);

    // Threshold brackets at eta/(1-gamma) = 0.95 and 1.05.
    const auto just_below = firm_dynamics(pop, cfg, 0.45 * 0.95, 0.55);
    const auto just_above = firm_dynamics(pop, cfg, 0.45 * 1.05, 0.55);
    CHECK(just_below.var_log_k.back() < just_below.var_log_k.front());
    CHECK(just_above.var_log_k.back() > just_above.var_log_k.front());

    const auto explosive = firm_dynamics(pop, cfg, 0.45 * 1.2, 0.55);
    for (std::size_t t = 1; t < explosive.var_log_k.size(); ++t)
        CHECK(explosive.var_log_k[t] >= explosive.var_log_k[t - 1] - 1e-12);

    // Frozen economy: no depreciation, no reinvestment.
    FirmDynamicsConfig frozen = cfg;
    frozen.s = 0.0;
    frozen.delta = 0.0;
    const auto flat = firm_dynamics(pop, frozen, 0.323, 0.55);
    for (double v : flat.var_log_k) CHECK(v == doctest::Approx(flat.var_log_k.front()).epsilon(1e-12));
}

TEST_CASE("wage decomposition identity and channel signs") {
    const SimPopulation pop = simulate_population(50000, 500, 0.35, 0.909, 23);
    const double comp = model::wage_compression(0.526, 0.50);
    // Post-AI sorting quality: the employer's ability signal degrades with
    // screening reliability.
    model::TaskTech tech{1.0, 0.526, 0.0, 1.0, 0.35};
    const double sorting =
        model::reliability(tech, 1.0, kEnv.sigma_eps) / model::reliability(tech, 0.0, kEnv.sigma_eps);
    const auto d = wage_decomposition(pop, 0.20, 1.0, comp, 0.142, 0.323, 0.55, Matching::Rank,
                                      sorting);

    CHECK(d.pre.total == doctest::Approx(d.pre.between + d.pre.within + d.pre.cov_term).epsilon(1e-9));
    CHECK(d.post.total == doctest::Approx(d.post.between + d.post.within + d.post.cov_term).epsilon(1e-9));

    CHECK(d.post.between > d.pre.between);   // rent-sharing widens
    CHECK(d.post.within < d.pre.within);     // homogenization compresses
    CHECK(d.post.cov_term < d.pre.cov_term); // sorting weakens
    CHECK(d.post.cov_term >= 0.0);           // but stays assortative
    CHECK(d.post.within / d.pre.within == doctest::Approx(comp * comp).epsilon(1e-6));

    const auto none = wage_decomposition(pop, 0.0, 1.0, comp, 0.142, 0.323, 0.55);
    CHECK(none.pre.between == doctest::Approx(0.0));
    CHECK(none.post.between == doctest::Approx(0.0));

    const auto random = wage_decomposition(pop, 0.20, 1.0, comp, 0.142, 0.323, 0.55,
                                           Matching::Random);
    CHECK(std::fabs(random.pre.cov_term) < 0.05 * d.pre.cov_term);

    CHECK_THROWS_AS(wage_decomposition(pop, 0.20, 1.0, comp, 0.142, 0.323, 0.55, Matching::Rank, 0.0),
                    std::domain_error);
}

TEST_CASE("oracle battery rows are close to the closed forms") {
    model::StructuralParams p;
    const auto rows = oracle_battery(p, kEnv, 50000, 20000, 29);
    REQUIRE(rows.size() >= 4);
    for (const auto& row : rows) {
        INFO(row.check);
        if (row.check == "gini_capital")
            CHECK(row.rel_error < 0.05);  // heavy-tailed, slower convergence
        else
            CHECK(row.rel_error < 0.02);
    }
    const std::string csv = oracle_csv(rows);
    CHECK(csv.find("check,seed,n,empirical,closed_form,rel_error") == 0);
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ineq/model.hpp"

namespace ineq::microsim {

struct Worker {
    double theta = 1.0;      // raw ability
    double h = 1.0;          // human capital
    double education = 0.0;
    bool credential = false;
    int firm = 0;
};

struct Firm {
    double capital = 1.0;
    double profit = 0.0;
    double wage_premium = 0.0;
    double theta_grad = 1.0;  // within-firm return to human capital
};

struct SimPopulation {
    std::vector<Worker> workers;
    std::vector<Firm> firms;
    std::uint64_t seed = 0;
};

struct FirmDynamicsConfig {
    double s = 0.2;      // reinvestment share
    double delta = 0.1;  // depreciation
    int horizon = 50;
    double wage = 1.0;
};

// g(e) = (1+e)^{a_g}, c(e, theta) = c0 e^2 / theta.
struct EducationForms {
    double a_g = 0.5;
    double c0 = 1.0;
};

enum class HumanCapitalForm { Multiplicative, Additive };

struct EducationChoice {
    double e = 0.0;
    bool corner = false;  // no interior root in the bracket
};

struct ScreeningResult {
    double rho = 0.0;
    double wage_gap = 0.0;
    double theta_hat = 0.0;
    double credential_share = 0.0;
    bool clamped = false;  // threshold hit the ability support edge
    double rho_empirical = 0.0;  // Monte Carlo regression check of rho
};

struct FirmDynamicsResult {
    std::vector<double> var_log_k;  // one entry per period, index 0 = initial
    bool explosive = false;
};

struct VarianceDecomposition {
    double between = 0.0;  // Var(premium)
    double within = 0.0;   // Var(grad * h)
    double cov_term = 0.0; // 2 Cov(premium, grad * h)
    double total = 0.0;
};

struct WageDecomposition {
    VarianceDecomposition pre;
    VarianceDecomposition post;
};

// Draw workers (h lognormal, mean 1, CV cv_h; theta = h) and firms
// (K lognormal with sigma from giniK). Byte-identical under a fixed seed.
SimPopulation simulate_population(int n_workers, int n_firms, double cv_h, double giniK,
                                  std::uint64_t seed);

// Empirical CV of y_i = h_i*phi*(1+beta*a) + alpha*a over the population.
double task_output_cv(const SimPopulation& pop, const model::TaskTech& tech, double a);

// Interior solution of theta*g'(e)*Phi = c_e(e, theta) by bracketed bisection.
// Under the additive form the ability-cost interaction drops out and e* is
// common across theta.
EducationChoice education_choice(double theta, double phi_index, const EducationForms& forms,
                                 HumanCapitalForm form = HumanCapitalForm::Multiplicative,
                                 double e_max = 50.0);

// Spence screening equilibrium on a finite population: credential cost
// cost_scale/theta, posterior weight (1-rho) on the credential prior.
ScreeningResult screening_equilibrium(const SimPopulation& pop, const model::TaskTech& tech,
                                      double a, double sigma_eps, double credential_cost_scale);

// Iterate K' = (1-delta)K + s*c_pi*K^{eta/(1-gamma_l)} and record Var(log K).
// c_pi is set so the mean profit/capital ratio starts at 0.1.
FirmDynamicsResult firm_dynamics(const SimPopulation& pop, const FirmDynamicsConfig& cfg,
                                 double eta, double gamma_l);

enum class Matching { Rank, Random };

// Wage variance decomposition, wages w = psi_j + grad*h_i with
// psi_j = xi*(eta/(1-gamma_l))*log K_j. Rank matching implements positive
// assortative matching; Random shuffles the assignment (covariance ~ 0).
// sorting_post in (0,1] is the post-AI assignment quality relative to full
// PAM: as screening reliability falls, workers are matched on a noisier
// ability signal and the sorting covariance weakens. Callers wanting the
// reliability-driven value pass rho(post)/rho(pre) from the screening model.
WageDecomposition wage_decomposition(const SimPopulation& pop, double xi, double theta_grad_pre,
                                     double theta_grad_post, double eta0, double eta1,
                                     double gamma_l, Matching matching = Matching::Rank,
                                     double sorting_post = 1.0);

// One row of the oracle summary: an empirical moment next to its closed form.
struct OracleRow {
    std::string check;
    std::uint64_t seed = 0;
    std::int64_t n = 0;
    double empirical = 0.0;
    double closed_form = 0.0;
    double rel_error = 0.0;
};

// Run the oracle battery comparing simulation against the closed forms.
std::vector<OracleRow> oracle_battery(const model::StructuralParams& p, const model::FixedEnv& env,
                                      int n_workers, int n_firms, std::uint64_t seed);

std::string oracle_csv(const std::vector<OracleRow>& rows);

} // namespace ineq::microsim

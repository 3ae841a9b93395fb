#pragma once

#include <span>
#include <vector>

namespace ineq::stats {

double norm_pdf(double x);

// Standard normal CDF via erfc; accurate to machine precision.
double norm_cdf(double x);

// Inverse standard normal CDF (Wichura's PPND16 rational approximation),
// |error| well below 1e-9 over (0,1); round-trip tested against norm_cdf.
double norm_ppf(double p);

// Upper-tail probability of a chi-squared variate with df degrees of freedom:
// Q(df/2, x/2) via the regularized incomplete gamma function.
double chi2_upper(double x, double df);

// Gini coefficient of a lognormal with log-scale sd sigma: 2*Phi(sigma/sqrt(2)) - 1.
double lognormal_gini(double sigma_log);

// Inverse of lognormal_gini; domain error outside [0, 1).
double gini_to_sigma(double gini);

// Gini of a non-negative sample, O(n log n) sorted form. Throws on an
// empty or all-zero sample.
double empirical_gini(std::span<const double> sample);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs); // population variance
double cv(std::span<const double> xs);       // sd / mean

// Linear-interpolation quantile (type 7), q in [0, 1]. Sorts a copy.
double quantile(std::vector<double> xs, double q);

} // namespace ineq::stats

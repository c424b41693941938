// Reference CDFs and quantiles: normal, chi-squared, and F (central and
// noncentral). Implemented with the standard series / continued-fraction
// evaluations of the regularized incomplete gamma and beta functions; the test
// suite validates them against a brute-force numerical-integration oracle to
// 1e-8. Noncentral CDFs are Poisson mixtures of the central ones, summed
// outward from the mode so large noncentrality parameters stay in range.
#pragma once

namespace dplr {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double reg_lower_gamma(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double reg_inc_beta(double a, double b, double x);

// Standard normal CDF and quantile (inverse CDF).
double normal_cdf(double z);
double normal_quantile(double p);

// Chi-squared with k degrees of freedom.
double chi2_cdf(double x, double k);
double chi2_quantile(double p, double k);

// Noncentral chi-squared with k degrees of freedom and noncentrality lambda
// (lambda = 0 reduces to the central case).
double noncentral_chi2_cdf(double x, double k, double lambda);

// F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);
double f_quantile(double p, double d1, double d2);

// Noncentral F with numerator noncentrality lambda.
double noncentral_f_cdf(double x, double d1, double d2, double lambda);

}  // namespace dplr

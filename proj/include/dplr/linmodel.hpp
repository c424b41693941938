// Non-private general-linear-model math for simple linear regression (p = 2):
// sufficient statistics, closed-form OLS fits, and the F test statistic in its
// direct moment form and its E/F/G reformulated form.
//
// Throughout, r = 2 regression parameters and q = 1 null-hypothesis parameters
// are fixed, so the statistic's leading factor is (n - 2)/1. The residual sum
// of squares is always computed from the moment identity
//   rss = n*(y2bar - 2*b2*ybar - 2*b1*xybar + b2^2 + 2*b1*b2*xbar + b1^2*x2bar)
// so that private and non-private paths share one formula.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dplr/errors.hpp"

namespace dplr {

// Fixed model dimensions: two regression parameters, one-dimensional null.
inline constexpr int kModelRank = 2;      // r
inline constexpr int kNullRank = 1;       // q

// Paired observations; row i is (x[i], y[i]) and one row is the privacy unit.
struct Dataset {
  std::vector<double> x;
  std::vector<double> y;

  std::int64_t n() const { return static_cast<std::int64_t>(x.size()); }
};

// Two-group data: rows [0, n1) are group 1, rows [n1, n) are group 2.
// Group membership is public.
struct GroupedDataset {
  std::vector<double> x;
  std::vector<double> y;
  std::int64_t n1 = 0;

  std::int64_t n() const { return static_cast<std::int64_t>(x.size()); }
  std::int64_t n2() const { return n() - n1; }
};

// The five sample averages plus n. Holds either exact moments or noised ones;
// after noising, x2bar >= xbar^2 and y2bar >= ybar^2 may fail, and downstream
// code must not assume them.
struct SuffStatsRaw {
  double xbar = 0.0;
  double ybar = 0.0;
  double x2bar = 0.0;
  double xybar = 0.0;
  double y2bar = 0.0;
  std::int64_t n = 0;

  double var_x() const { return x2bar - xbar * xbar; }       // sigma^2_x hat
  double cov_xy() const { return xybar - xbar * ybar; }      // sigma^2_xy hat
};

// OLS result. For the linear design, beta1 is the slope and beta2 the
// intercept; for the mixture design, beta1 and beta2 are the two group slopes.
// Invariant: s2 = rss / (n - 2).
struct OlsFit {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double s2 = 0.0;
  double rss = 0.0;
};

// Closed-form decomposition of the design's normalized Gram matrix:
// E is the unique positive-definite square root of (X'X)/n, F = X'Y/n,
// G = Y'Y/n. E*E reproduces (X'X)/n entry-wise to 1e-10 relative.
struct EFGDecomposition {
  std::array<std::array<double, 2>, 2> E{};
  std::array<double, 2> F{};
  double G = 0.0;
};

// Per-group second moments needed by the mixture F statistic.
struct MixtureMoments {
  double x2bar1 = 0.0;
  double x2bar2 = 0.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  std::int64_t n() const { return n1 + n2; }
  // Pooled second moment (n1*x2bar1 + n2*x2bar2)/n.
  double x2bar() const {
    const double total = static_cast<double>(n());
    return (static_cast<double>(n1) * x2bar1 + static_cast<double>(n2) * x2bar2) / total;
  }
};

// Shared moment-identity rss. Not clamped: noised moments may drive it
// negative, and the private callers need the raw value.
double rss_from_moments(const SuffStatsRaw& s, double beta1, double beta2);

// Exact sample averages of d; no clipping, no noise. Throws InvalidSpec if the
// x/y lengths differ or the dataset is empty. Entry finiteness is the caller's
// contract.
SuffStatsRaw suff_stats(const Dataset& d);

// Per-group exact averages for a grouped dataset (group g in {1, 2}).
SuffStatsRaw suff_stats_group(const GroupedDataset& g, int group);

// Slope/intercept fit: beta1 = cov_xy/var_x, beta2 = (ybar*x2bar - xbar*xybar)/var_x,
// rss from the moment identity (clamped at zero: exact inputs guarantee
// rss >= 0 up to roundoff), s2 = rss/(n-2).
// Throws SingularDesign when var_x <= 0.
OlsFit ols_linear(const SuffStatsRaw& s);

// F statistic for H0: slope = 0, T = beta1^2 * n * var_x / s2, distributed as
// F_{1, n-2} under the null. Throws ZeroVariance when s2 = 0 (perfect fit).
double f_stat_linear(const OlsFit& fit, const SuffStatsRaw& s);

// Two-slope fit for the mixture design (no intercepts): beta_g = xybar_g/x2bar_g,
// rss = sum over groups of n_g*(y2bar_g - 2*beta_g*xybar_g + beta_g^2*x2bar_g),
// s2 = rss/(n-2). Throws SingularDesign if either group's x is all zeros
// (x2bar_g <= 0); requires n1 >= 1 and n2 >= 1.
OlsFit ols_mixture(const GroupedDataset& g);

// F statistic for H0: the two group slopes are equal,
// T = (n1*x2bar1 * n2*x2bar2) / (s2 * n * x2bar) * (beta1 - beta2)^2.
// Zero iff beta1 = beta2; throws ZeroVariance when s2 = 0.
double f_stat_mixture(const OlsFit& fit, const MixtureMoments& m);

// Closed-form E/F/G for the simple linear design. Requires var_x >= 0 for a
// real square root; throws NegativeVariance otherwise (possible only for
// noised inputs).
EFGDecomposition efg_decompose(const SuffStatsRaw& s);

// Reformulated statistic
//   T = (n-r)/(r-q) * ||sqrt(n) E (beta - betaN)||^2
//                   / (n * (beta'E^2 beta - 2 beta'F + G))
// with beta = (intercept, slope) ordered intercept-first. Equals f_stat_linear
// on the same exact inputs to within 1e-8 relative. Throws
// NonpositiveDenominator when the denominator is not positive.
double f_stat_reformulated(const EFGDecomposition& e, const std::array<double, 2>& beta,
                           const std::array<double, 2>& beta_null, std::int64_t n,
                           int r = kModelRank, int q = kNullRank);

}  // namespace dplr

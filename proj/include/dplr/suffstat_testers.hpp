// Sufficient-statistic-perturbation testers under rho-zCDP.
//
// Each procedure clips the per-row moments, releases each moment through the
// Gaussian mechanism on an equal share of the budget (5 releases for the
// linear design, 8 for the two-group mixture design), post-processes the noisy
// moments into slope/variance estimates, and returns the (null, alternative)
// statistic bundles -- or Bottom (nullopt) when the noised variances cannot
// simulate a null distribution. Bottom always means "fail to reject": the
// procedures err on the side of not rejecting.
#pragma once

#include <cstdint>
#include <optional>

#include "dplr/dp.hpp"
#include "dplr/linmodel.hpp"
#include "dplr/random.hpp"

namespace dplr {

// Null-model parameters released by the linear procedure: intercept estimate,
// x moments, and the null residual variance. Only constructed when the gate
// min(s0_sq, n*(x2bar - xbar^2)/(n-1)) > 0 holds.
struct ThetaLinearNull {
  double beta2 = 0.0;
  double xbar = 0.0;
  double x2bar = 0.0;
  double s0_sq = 0.0;
  std::int64_t n = 0;
};

// Alternative-model parameters: slope estimate, x moments, full-model residual
// variance. Same gate as the null bundle.
struct ThetaLinearAlt {
  double beta1 = 0.0;
  double xbar = 0.0;
  double x2bar = 0.0;
  double s_sq = 0.0;
  std::int64_t n = 0;
};

struct LinearThetas {
  ThetaLinearNull null_theta;
  ThetaLinearAlt alt_theta;
};

// Bottom is encoded as nullopt.
using LinearThetaPair = std::optional<LinearThetas>;

// Which slope the mixture null bundle carries for null simulation: the pooled
// (n1/n)*beta1 + (n2/n)*beta2 combination (default), or literally the group-1
// slope.
enum class MixtureNullSlope { Pooled, Group1 };

struct ThetaMixtureNull {
  double slope = 0.0;  // null-simulation slope, per MixtureNullSlope
  double xbar = 0.0;   // pooled
  double x2bar = 0.0;  // pooled
  double s0_sq = 0.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n = 0;
};

struct ThetaMixtureAlt {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double x2bar1 = 0.0;
  double x2bar2 = 0.0;
  double x2bar = 0.0;  // pooled
  double s_sq = 0.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n = 0;
};

struct MixtureThetas {
  ThetaMixtureNull null_theta;
  ThetaMixtureAlt alt_theta;
};

using MixtureThetaPair = std::optional<MixtureThetas>;

// The five linear-design releases, each on budget/5 (draw order: xbar, ybar,
// x2bar, xybar, y2bar). Per-row clipping: x and y to [-delta, delta], x^2 and
// y^2 to [0, delta^2], xy to [-delta^2, delta^2]; sensitivities are the
// induced range widths divided by n. Exposed separately so noise calibration
// can be audited release by release.
SuffStatsRaw noised_moments_linear(const Dataset& d, const PrivacyBudget& budget,
                                   const ClipBound& delta, RandomSource& rng);

// Deterministic post-processing of the released moments into theta bundles;
// Bottom when the slope denominator x2bar - xbar^2 is nonpositive or the gate
// fails.
LinearThetaPair linear_thetas_from_moments(const SuffStatsRaw& m);

// Full procedure: noised_moments_linear then linear_thetas_from_moments.
// Consumes exactly 5 noise draws at budget/5 each; rho-zCDP in the rows of d.
LinearThetaPair dp_stats_linear(const Dataset& d, const PrivacyBudget& budget,
                                const ClipBound& delta, RandomSource& rng);

// The eight per-group mixture releases, each on budget/8 (draw order: xbar1,
// xbar2, x2bar1, x2bar2, xybar1, xybar2, y2bar1, y2bar2); per-group
// sensitivities use the group sizes. Pooled accessors weight by n_j/n.
struct NoisedGroupMoments {
  double xbar1 = 0.0, xbar2 = 0.0;
  double x2bar1 = 0.0, x2bar2 = 0.0;
  double xybar1 = 0.0, xybar2 = 0.0;
  double y2bar1 = 0.0, y2bar2 = 0.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  std::int64_t n() const { return n1 + n2; }
  double pooled(double g1, double g2) const {
    const double total = static_cast<double>(n());
    return (static_cast<double>(n1) * g1 + static_cast<double>(n2) * g2) / total;
  }
  double xbar() const { return pooled(xbar1, xbar2); }
  double x2bar() const { return pooled(x2bar1, x2bar2); }
  double xybar() const { return pooled(xybar1, xybar2); }
  double y2bar() const { return pooled(y2bar1, y2bar2); }
};

NoisedGroupMoments noised_moments_mixture(const GroupedDataset& g,
                                          const PrivacyBudget& budget,
                                          const ClipBound& delta, RandomSource& rng);

// Post-processing: per-group slopes beta_j = xybar_j / x2bar_j, pooled slope
// beta = (n1/n) beta1 + (n2/n) beta2, and residual variances from the
// no-intercept moment identity
//   S0^2 = n (y2bar - 2 beta xybar + beta^2 x2bar) / (n - 2)         (pooled)
//   S^2  = sum_j n_j (y2bar_j - 2 beta_j xybar_j + beta_j^2 x2bar_j) / (n - 2).
// Bottom when either group's noisy second moment is nonpositive (slopes
// unusable) or the gate min(S0^2, n*(x2bar - xbar^2)/(n-1)) > 0 fails.
MixtureThetaPair mixture_thetas_from_moments(
    const NoisedGroupMoments& m, MixtureNullSlope mode = MixtureNullSlope::Pooled);

// Full procedure: 8 noise draws at budget/8 each; rho-zCDP in the rows of g.
// Requires n1 >= 2 and n2 >= 2.
MixtureThetaPair dp_stats_mixture(const GroupedDataset& g, const PrivacyBudget& budget,
                                  const ClipBound& delta, RandomSource& rng,
                                  MixtureNullSlope mode = MixtureNullSlope::Pooled);

// The non-private statistic formula applied to the private statistics:
// T = beta1^2 * n * (x2bar - xbar^2) / s_sq. Throws NonpositiveVariancePiece
// when x2bar - xbar^2 <= 0 (cannot happen for gate-passing bundles; signals
// the caller to fail to reject).
double private_f_stat_linear(const ThetaLinearAlt& theta1);

// T = (n1*x2bar1 * n2*x2bar2) / (s_sq * n * x2bar) * (beta1 - beta2)^2.
// Throws NonpositiveVariancePiece when the pooled x2bar <= 0.
double private_f_stat_mixture(const ThetaMixtureAlt& theta1);

}  // namespace dplr

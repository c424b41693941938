// Monte Carlo calibration for private tests.
//
// A tester produces a noisy parameter bundle (or Bottom) from data, a scalar
// test statistic from the alternative bundle, and synthetic null datasets from
// the null bundle. The framework runs the tester once on the real data, then
// K more times on freshly simulated null datasets -- each simulation passes
// through the same private release at the same full budget -- and rejects when
// the real statistic strictly exceeds the rank-r order statistic of the
// simulated ones, r = ceil((K+1)(1-alpha)). Anything that prevents a
// comparison (Bottom, degenerate statistic) resolves to FailToReject.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "dplr/dp.hpp"
#include "dplr/errors.hpp"
#include "dplr/linmodel.hpp"
#include "dplr/random.hpp"
#include "dplr/suffstat_testers.hpp"

namespace dplr {

enum class Outcome { Reject, FailToReject };

enum class DecisionReason {
  RankExceeded,    // statistic strictly above the rank-r simulated order stat
  BottomTheta,     // private release returned Bottom on the real data
  DegenerateStat,  // statistic undefined on the real data's released bundle
  CIExclusion,     // hypothesized value fell outside the interval
  CIInclusion,     // hypothesized value fell inside the interval
};

struct Decision {
  Outcome outcome = Outcome::FailToReject;
  std::optional<double> statistic;  // the real data's statistic, when defined
  std::optional<double> threshold;  // rank-r simulated order statistic
  std::optional<DecisionReason> reason;
  std::optional<double> approx_p;   // (1 + #{sim >= real}) / (K + 1)
  std::optional<double> ci_lo, ci_hi;  // interval testers only
};

// How a simulation that cannot produce a statistic (Bottom bundle, degenerate
// or NaN statistic) enters the calibration sample.
enum class BottomSimPolicy {
  MinusInfinity,  // score it -infinity: never pushes the threshold up
  Redraw,         // redraw the simulation (fresh substream), up to 100 tries
};

struct MCConfig {
  int K = 1000;
  double alpha = 0.05;
  BottomSimPolicy bottom_sim = BottomSimPolicy::MinusInfinity;

  void validate() const {
    if (K < 1) throw InvalidSpec("K must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
    if (static_cast<double>(K) * alpha <= 1.0)
      throw InvalidSpec("need K > 1/alpha for a valid rejection rank");
  }
};

// One-based rank r = ceil((K+1)(1-alpha)), computed defensively against
// floating-point edges landing exactly on an integer.
inline int mc_rejection_rank(int K, double alpha) {
  return static_cast<int>(
      std::ceil((static_cast<double>(K) + 1.0) * (1.0 - alpha) - 1e-9));
}

// Stream layout shared by every Monte Carlo consumer: the real-data release
// uses substream 0; simulation slot k (1-based) uses substream a*K + k on
// attempt a (a > 0 only under BottomSimPolicy::Redraw).
//
// Tester concept:
//   using Data      = ...;          // dataset type
//   using Thetas    = ...;          // struct with .null_theta / .alt_theta
//   std::optional<Thetas> dp_stats(const Data&, const PrivacyBudget&,
//                                  const ClipBound&, RandomSource&) const;
//   double statistic(const AltTheta&) const;      // may throw
//   Data sample_null(const NullTheta&, RandomSource&) const;
template <typename Tester>
Decision mc_test(const Tester& tester, const typename Tester::Data& data,
                 const PrivacyBudget& budget, const ClipBound& delta,
                 const MCConfig& cfg, RandomSource& rng) {
  cfg.validate();

  RandomSource real_rng = rng.substream(0);
  auto thetas = tester.dp_stats(data, budget, delta, real_rng);
  if (!thetas) {
    Decision d;
    d.outcome = Outcome::FailToReject;
    d.reason = DecisionReason::BottomTheta;
    return d;
  }

  double t_real;
  try {
    t_real = tester.statistic(thetas->alt_theta);
  } catch (const Error&) {
    Decision d;
    d.outcome = Outcome::FailToReject;
    d.reason = DecisionReason::DegenerateStat;
    return d;
  }
  if (std::isnan(t_real)) {
    Decision d;
    d.outcome = Outcome::FailToReject;
    d.reason = DecisionReason::DegenerateStat;
    return d;
  }

  constexpr int kMaxRedraws = 100;
  const int K = cfg.K;
  std::vector<double> sims;
  sims.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    double t_k = -std::numeric_limits<double>::infinity();
    const int attempts = cfg.bottom_sim == BottomSimPolicy::Redraw ? kMaxRedraws : 1;
    for (int a = 0; a < attempts; ++a) {
      RandomSource sim_rng =
          rng.substream(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(K) +
                        static_cast<std::uint64_t>(k));
      auto sim_data = tester.sample_null(thetas->null_theta, sim_rng);
      auto sim_thetas = tester.dp_stats(sim_data, budget, delta, sim_rng);
      if (!sim_thetas) continue;
      double t;
      try {
        t = tester.statistic(sim_thetas->alt_theta);
      } catch (const Error&) {
        continue;
      }
      if (std::isnan(t)) continue;
      t_k = t;
      break;
    }
    sims.push_back(t_k);
  }

  int ge_count = 0;
  for (double t : sims) {
    if (t >= t_real) ++ge_count;
  }
  std::sort(sims.begin(), sims.end());
  const int r = mc_rejection_rank(K, cfg.alpha);
  const double threshold = sims[static_cast<std::size_t>(r - 1)];

  Decision d;
  d.statistic = t_real;
  d.threshold = threshold;
  d.approx_p = (1.0 + static_cast<double>(ge_count)) / (static_cast<double>(K) + 1.0);
  if (t_real > threshold) {
    d.outcome = Outcome::Reject;
    d.reason = DecisionReason::RankExceeded;
  } else {
    d.outcome = Outcome::FailToReject;
  }
  return d;
}

// Null model for the linear design: x ~ N(xbar, n(x2bar - xbar^2)/(n-1)),
// y = beta2 + N(0, s0_sq), independently per row. The gate in the release
// guarantees both variances are positive.
Dataset sample_null_linear(const ThetaLinearNull& theta0, RandomSource& rng);

// Null model for the mixture design: x ~ N(pooled xbar, pooled x-variance),
// y = slope * x + N(0, s0_sq); group sizes preserved (first n1 rows group 1).
GroupedDataset sample_null_mixture(const ThetaMixtureNull& theta0, RandomSource& rng);

// Private F-test for slope = 0 in the linear design, calibrated by mc_test.
struct LinearFTester {
  using Data = Dataset;
  using Thetas = LinearThetas;

  std::optional<LinearThetas> dp_stats(const Dataset& d, const PrivacyBudget& budget,
                                       const ClipBound& delta, RandomSource& rng) const;
  double statistic(const ThetaLinearAlt& theta1) const;
  Dataset sample_null(const ThetaLinearNull& theta0, RandomSource& rng) const;
};

// Private F-test for equal slopes across the two groups of a no-intercept
// mixture design, calibrated by mc_test.
struct MixtureFTester {
  using Data = GroupedDataset;
  using Thetas = MixtureThetas;

  MixtureNullSlope null_slope = MixtureNullSlope::Pooled;

  std::optional<MixtureThetas> dp_stats(const GroupedDataset& g,
                                        const PrivacyBudget& budget,
                                        const ClipBound& delta,
                                        RandomSource& rng) const;
  double statistic(const ThetaMixtureAlt& theta1) const;
  GroupedDataset sample_null(const ThetaMixtureNull& theta0, RandomSource& rng) const;
};

// Parametric-bootstrap confidence-interval test of slope == b for the linear
// design. Releases the private bundle (substream 0), then draws K bootstrap
// slopes by regenerating data from the fitted model (slope beta1~, intercept
// beta2~, error variance S~^2, x ~ N(xbar~, n*var/(n-1))) and re-running the
// full private release on each replicate (sim k attempt a uses substream
// a*K + k; a Bottom replicate is redrawn, up to 100 attempts). Rejects when
// b lies outside the open interval (s_(l), s_(r)) with
// l = ceil((K+1) alpha/2), r = ceil((K+1)(1 - alpha/2)). Bottom releases
// fail to reject. Requires alpha*(K+1) > 2 so both ranks are usable.
Decision ci_bootstrap_test(const Dataset& d, const PrivacyBudget& budget,
                           const ClipBound& delta, const MCConfig& cfg, double b,
                           RandomSource& rng);

}  // namespace dplr

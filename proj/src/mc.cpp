#include "dplr/mc.hpp"

#include <cmath>

namespace dplr {

Dataset sample_null_linear(const ThetaLinearNull& theta0, RandomSource& rng) {
  const double nd = static_cast<double>(theta0.n);
  const double x_var = nd * (theta0.x2bar - theta0.xbar * theta0.xbar) / (nd - 1.0);
  const double x_sd = std::sqrt(x_var);
  const double e_sd = std::sqrt(theta0.s0_sq);

  Dataset d;
  d.x.resize(static_cast<std::size_t>(theta0.n));
  d.y.resize(static_cast<std::size_t>(theta0.n));
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    d.x[i] = rng.normal(theta0.xbar, x_sd);
    d.y[i] = theta0.beta2 + rng.normal(0.0, e_sd);
  }
  return d;
}

GroupedDataset sample_null_mixture(const ThetaMixtureNull& theta0, RandomSource& rng) {
  const double nd = static_cast<double>(theta0.n);
  const double x_var = nd * (theta0.x2bar - theta0.xbar * theta0.xbar) / (nd - 1.0);
  const double x_sd = std::sqrt(x_var);
  const double e_sd = std::sqrt(theta0.s0_sq);

  GroupedDataset g;
  g.n1 = theta0.n1;
  g.x.resize(static_cast<std::size_t>(theta0.n));
  g.y.resize(static_cast<std::size_t>(theta0.n));
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    g.x[i] = rng.normal(theta0.xbar, x_sd);
    g.y[i] = theta0.slope * g.x[i] + rng.normal(0.0, e_sd);
  }
  return g;
}

std::optional<LinearThetas> LinearFTester::dp_stats(const Dataset& d,
                                                    const PrivacyBudget& budget,
                                                    const ClipBound& delta,
                                                    RandomSource& rng) const {
  return dp_stats_linear(d, budget, delta, rng);
}

double LinearFTester::statistic(const ThetaLinearAlt& theta1) const {
  return private_f_stat_linear(theta1);
}

Dataset LinearFTester::sample_null(const ThetaLinearNull& theta0,
                                   RandomSource& rng) const {
  return sample_null_linear(theta0, rng);
}

std::optional<MixtureThetas> MixtureFTester::dp_stats(const GroupedDataset& g,
                                                      const PrivacyBudget& budget,
                                                      const ClipBound& delta,
                                                      RandomSource& rng) const {
  return dp_stats_mixture(g, budget, delta, rng, null_slope);
}

double MixtureFTester::statistic(const ThetaMixtureAlt& theta1) const {
  return private_f_stat_mixture(theta1);
}

GroupedDataset MixtureFTester::sample_null(const ThetaMixtureNull& theta0,
                                           RandomSource& rng) const {
  return sample_null_mixture(theta0, rng);
}

Decision ci_bootstrap_test(const Dataset& d, const PrivacyBudget& budget,
                           const ClipBound& delta, const MCConfig& cfg, double b,
                           RandomSource& rng) {
  if (cfg.K < 1) throw InvalidSpec("K must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw InvalidSpec("alpha must be in (0,1)");
  if ((static_cast<double>(cfg.K) + 1.0) * cfg.alpha <= 2.0)
    throw InvalidSpec("need (K+1)*alpha > 2 for valid interval ranks");

  RandomSource real_rng = rng.substream(0);
  auto thetas = dp_stats_linear(d, budget, delta, real_rng);
  if (!thetas) {
    Decision out;
    out.outcome = Outcome::FailToReject;
    out.reason = DecisionReason::BottomTheta;
    return out;
  }
  const ThetaLinearNull& null_theta = thetas->null_theta;
  const ThetaLinearAlt& alt = thetas->alt_theta;
  if (!(alt.s_sq > 0.0)) {
    // The gate only constrains the null variance; a nonpositive fitted error
    // variance leaves no model to bootstrap from, so fail conservatively.
    Decision out;
    out.outcome = Outcome::FailToReject;
    out.reason = DecisionReason::DegenerateStat;
    return out;
  }
  const double nd = static_cast<double>(alt.n);
  // Gate-passing bundles have positive x-variance, so x_var > 0 here.
  const double x_var = nd * (alt.x2bar - alt.xbar * alt.xbar) / (nd - 1.0);
  const double x_sd = std::sqrt(x_var);
  const double e_sd = std::sqrt(alt.s_sq);

  // Bootstrap slope distribution: regenerate data from the fitted model and
  // push each replicate through the same private release, so the interval
  // reflects sampling noise and privacy noise together.
  const auto sample_fitted = [&](RandomSource& sim_rng) {
    Dataset sim;
    sim.x.resize(static_cast<std::size_t>(alt.n));
    sim.y.resize(static_cast<std::size_t>(alt.n));
    for (std::size_t i = 0; i < sim.x.size(); ++i) {
      sim.x[i] = sim_rng.normal(alt.xbar, x_sd);
      sim.y[i] = null_theta.beta2 + alt.beta1 * sim.x[i] + sim_rng.normal(0.0, e_sd);
    }
    return sim;
  };

  constexpr int kMaxAttempts = 100;
  std::vector<double> slopes(static_cast<std::size_t>(cfg.K));
  for (int k = 1; k <= cfg.K; ++k) {
    bool found = false;
    for (int attempt = 0; attempt < kMaxAttempts && !found; ++attempt) {
      RandomSource sim_rng =
          rng.substream(static_cast<std::uint64_t>(attempt) *
                            static_cast<std::uint64_t>(cfg.K) +
                        static_cast<std::uint64_t>(k));
      const Dataset sim = sample_fitted(sim_rng);
      auto sim_thetas = dp_stats_linear(sim, budget, delta, sim_rng);
      if (sim_thetas) {
        slopes[static_cast<std::size_t>(k - 1)] = sim_thetas->alt_theta.beta1;
        found = true;
      }
    }
    if (!found) {
      // The fitted model almost never survives its own release; no usable
      // interval exists, so fall back to the conservative outcome.
      Decision out;
      out.outcome = Outcome::FailToReject;
      out.reason = DecisionReason::DegenerateStat;
      return out;
    }
  }
  std::sort(slopes.begin(), slopes.end());

  const double kp1 = static_cast<double>(cfg.K) + 1.0;
  const int lo_rank = static_cast<int>(std::ceil(kp1 * (cfg.alpha / 2.0) - 1e-9));
  const int hi_rank = static_cast<int>(std::ceil(kp1 * (1.0 - cfg.alpha / 2.0) - 1e-9));
  const double lo = slopes[static_cast<std::size_t>(lo_rank - 1)];
  const double hi = slopes[static_cast<std::size_t>(hi_rank - 1)];

  Decision out;
  out.statistic = alt.beta1;
  out.ci_lo = lo;
  out.ci_hi = hi;
  if (lo < b && b < hi) {
    out.outcome = Outcome::FailToReject;
    out.reason = DecisionReason::CIInclusion;
  } else {
    out.outcome = Outcome::Reject;
    out.reason = DecisionReason::CIExclusion;
  }
  return out;
}

}  // namespace dplr

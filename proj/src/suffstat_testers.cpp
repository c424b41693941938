#include "dplr/suffstat_testers.hpp"

#include <algorithm>
#include <cmath>

#include "dplr/errors.hpp"

namespace dplr {

namespace {

// Gate shared by both designs: both candidate null variances must be strictly
// positive or the released parameters cannot drive a null simulation.
bool variance_gate(double s0_sq, double x2bar, double xbar_sq, std::int64_t n) {
  const double nd = static_cast<double>(n);
  const double x_var = nd * (x2bar - xbar_sq) / (nd - 1.0);
  return std::min(s0_sq, x_var) > 0.0;
}

}  // namespace

SuffStatsRaw noised_moments_linear(const Dataset& d, const PrivacyBudget& budget,
                                   const ClipBound& delta, RandomSource& rng) {
  const std::size_t n = d.x.size();
  if (n < 3) {
    throw InvalidSpec("linear DP release requires n >= 3");
  }
  const double dl = delta.delta();
  const double dl2 = dl * dl;
  const double nd = static_cast<double>(n);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xc = clip(d.x[i], -dl, dl);
    const double yc = clip(d.y[i], -dl, dl);
    sx += xc;
    sy += yc;
    sxx += clip(d.x[i] * d.x[i], 0.0, dl2);
    sxy += clip(d.x[i] * d.y[i], -dl2, dl2);
    syy += clip(d.y[i] * d.y[i], 0.0, dl2);
  }

  const PrivacyBudget share = split_budget(budget, 5)[0];
  SuffStatsRaw out;
  out.n = static_cast<std::int64_t>(n);
  out.xbar = gaussian_mech(sx / nd, 2.0 * dl / nd, share, rng);
  out.ybar = gaussian_mech(sy / nd, 2.0 * dl / nd, share, rng);
  out.x2bar = gaussian_mech(sxx / nd, dl2 / nd, share, rng);
  out.xybar = gaussian_mech(sxy / nd, 2.0 * dl2 / nd, share, rng);
  out.y2bar = gaussian_mech(syy / nd, dl2 / nd, share, rng);
  return out;
}

LinearThetaPair linear_thetas_from_moments(const SuffStatsRaw& m) {
  const double denom = m.x2bar - m.xbar * m.xbar;
  if (denom <= 0.0) {
    return std::nullopt;
  }
  const double nd = static_cast<double>(m.n);
  const double beta1 = (m.xybar - m.xbar * m.ybar) / denom;
  const double beta2 = (m.ybar * m.x2bar - m.xbar * m.xybar) / denom;

  const double s0_sq =
      nd * (m.y2bar - 2.0 * beta2 * m.ybar + beta2 * beta2) / (nd - kModelRank);
  const double s_sq = rss_from_moments(m, beta1, beta2) / (nd - kModelRank);

  if (!variance_gate(s0_sq, m.x2bar, m.xbar * m.xbar, m.n)) {
    return std::nullopt;
  }

  LinearThetas out;
  out.null_theta = ThetaLinearNull{beta2, m.xbar, m.x2bar, s0_sq, m.n};
  out.alt_theta = ThetaLinearAlt{beta1, m.xbar, m.x2bar, s_sq, m.n};
  return out;
}

LinearThetaPair dp_stats_linear(const Dataset& d, const PrivacyBudget& budget,
                                const ClipBound& delta, RandomSource& rng) {
  return linear_thetas_from_moments(noised_moments_linear(d, budget, delta, rng));
}

NoisedGroupMoments noised_moments_mixture(const GroupedDataset& g,
                                          const PrivacyBudget& budget,
                                          const ClipBound& delta, RandomSource& rng) {
  if (g.n1 < 2 || g.n2() < 2) {
    throw InvalidSpec("mixture DP release requires at least 2 rows per group");
  }
  const double dl = delta.delta();
  const double dl2 = dl * dl;

  // Per-group clipped sums; group 1 is rows [0, n1), group 2 the rest.
  const std::size_t n1s = static_cast<std::size_t>(g.n1);
  double sx[2] = {0.0, 0.0};
  double sxx[2] = {0.0, 0.0};
  double sxy[2] = {0.0, 0.0};
  double syy[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const int j = i < n1s ? 0 : 1;
    sx[j] += clip(g.x[i], -dl, dl);
    sxx[j] += clip(g.x[i] * g.x[i], 0.0, dl2);
    sxy[j] += clip(g.x[i] * g.y[i], -dl2, dl2);
    syy[j] += clip(g.y[i] * g.y[i], 0.0, dl2);
  }
  const double n1 = static_cast<double>(g.n1);
  const double n2 = static_cast<double>(g.n2());

  const PrivacyBudget share = split_budget(budget, 8)[0];
  NoisedGroupMoments out;
  out.n1 = g.n1;
  out.n2 = g.n2();
  out.xbar1 = gaussian_mech(sx[0] / n1, 2.0 * dl / n1, share, rng);
  out.xbar2 = gaussian_mech(sx[1] / n2, 2.0 * dl / n2, share, rng);
  out.x2bar1 = gaussian_mech(sxx[0] / n1, dl2 / n1, share, rng);
  out.x2bar2 = gaussian_mech(sxx[1] / n2, dl2 / n2, share, rng);
  out.xybar1 = gaussian_mech(sxy[0] / n1, 2.0 * dl2 / n1, share, rng);
  out.xybar2 = gaussian_mech(sxy[1] / n2, 2.0 * dl2 / n2, share, rng);
  out.y2bar1 = gaussian_mech(syy[0] / n1, dl2 / n1, share, rng);
  out.y2bar2 = gaussian_mech(syy[1] / n2, dl2 / n2, share, rng);
  return out;
}

MixtureThetaPair mixture_thetas_from_moments(const NoisedGroupMoments& m,
                                             MixtureNullSlope mode) {
  if (m.x2bar1 <= 0.0 || m.x2bar2 <= 0.0) {
    return std::nullopt;
  }
  const double n1 = static_cast<double>(m.n1);
  const double n2 = static_cast<double>(m.n2);
  const double nd = static_cast<double>(m.n());

  const double beta1 = m.xybar1 / m.x2bar1;
  const double beta2 = m.xybar2 / m.x2bar2;
  const double pooled_beta = (n1 * beta1 + n2 * beta2) / nd;

  const double xbar = m.xbar();
  const double x2bar = m.x2bar();
  const double xybar = m.xybar();
  const double y2bar = m.y2bar();

  // No-intercept residual moment identity, pooled for the null model and
  // per-group for the alternative.
  const double s0_sq =
      nd * (y2bar - 2.0 * pooled_beta * xybar + pooled_beta * pooled_beta * x2bar) /
      (nd - kModelRank);
  const double rss1 = n1 * (m.y2bar1 - 2.0 * beta1 * m.xybar1 + beta1 * beta1 * m.x2bar1);
  const double rss2 = n2 * (m.y2bar2 - 2.0 * beta2 * m.xybar2 + beta2 * beta2 * m.x2bar2);
  const double s_sq = (rss1 + rss2) / (nd - kModelRank);

  if (!variance_gate(s0_sq, x2bar, xbar * xbar, m.n())) {
    return std::nullopt;
  }

  MixtureThetas out;
  const double null_slope = mode == MixtureNullSlope::Group1 ? beta1 : pooled_beta;
  out.null_theta = ThetaMixtureNull{null_slope, xbar, x2bar, s0_sq, m.n1, m.n2, m.n()};
  out.alt_theta = ThetaMixtureAlt{beta1,    beta2, m.x2bar1, m.x2bar2, x2bar,
                                  s_sq,     m.n1,  m.n2,     m.n()};
  return out;
}

MixtureThetaPair dp_stats_mixture(const GroupedDataset& g, const PrivacyBudget& budget,
                                  const ClipBound& delta, RandomSource& rng,
                                  MixtureNullSlope mode) {
  return mixture_thetas_from_moments(noised_moments_mixture(g, budget, delta, rng), mode);
}

double private_f_stat_linear(const ThetaLinearAlt& theta1) {
  const double denom = theta1.x2bar - theta1.xbar * theta1.xbar;
  if (denom <= 0.0) {
    throw NonpositiveVariancePiece("x2bar - xbar^2 <= 0 in private statistic");
  }
  if (theta1.s_sq <= 0.0) {
    throw NonpositiveVariancePiece("s_sq <= 0 in private statistic");
  }
  const double nd = static_cast<double>(theta1.n);
  return theta1.beta1 * theta1.beta1 * nd * denom / theta1.s_sq;
}

double private_f_stat_mixture(const ThetaMixtureAlt& theta1) {
  if (theta1.x2bar <= 0.0) {
    throw NonpositiveVariancePiece("pooled x2bar <= 0 in private statistic");
  }
  if (theta1.s_sq <= 0.0) {
    throw NonpositiveVariancePiece("s_sq <= 0 in private statistic");
  }
  const double n1 = static_cast<double>(theta1.n1);
  const double n2 = static_cast<double>(theta1.n2);
  const double nd = static_cast<double>(theta1.n);
  const double diff = theta1.beta1 - theta1.beta2;
  return (n1 * theta1.x2bar1 * n2 * theta1.x2bar2) /
         (theta1.s_sq * nd * theta1.x2bar) * diff * diff;
}

}  // namespace dplr

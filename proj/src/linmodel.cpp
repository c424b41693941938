#include "dplr/linmodel.hpp"

#include <cmath>

namespace dplr {

double rss_from_moments(const SuffStatsRaw& s, double beta1, double beta2) {
  // ||Y - X beta||^2 expanded in the five averages; identical formula for the
  // exact and the noised paths.
  const double n = static_cast<double>(s.n);
  return n * (s.y2bar - 2.0 * beta2 * s.ybar - 2.0 * beta1 * s.xybar +
              beta2 * beta2 + 2.0 * beta1 * beta2 * s.xbar + beta1 * beta1 * s.x2bar);
}

SuffStatsRaw suff_stats(const Dataset& d) {
  if (d.x.size() != d.y.size()) throw InvalidSpec("x and y lengths differ");
  if (d.x.empty()) throw InvalidSpec("empty dataset");
  SuffStatsRaw s;
  s.n = d.n();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double x = d.x[i], y = d.y[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double inv_n = 1.0 / static_cast<double>(s.n);
  s.xbar = sx * inv_n;
  s.ybar = sy * inv_n;
  s.x2bar = sxx * inv_n;
  s.xybar = sxy * inv_n;
  s.y2bar = syy * inv_n;
  return s;
}

SuffStatsRaw suff_stats_group(const GroupedDataset& g, int group) {
  if (g.x.size() != g.y.size()) throw InvalidSpec("x and y lengths differ");
  if (group != 1 && group != 2) throw InvalidSpec("group must be 1 or 2");
  if (g.n1 <= 0 || g.n1 >= g.n())
    throw InvalidSpec("group split must satisfy 0 < n1 < n");
  const std::size_t lo = group == 1 ? 0 : static_cast<std::size_t>(g.n1);
  const std::size_t hi = group == 1 ? static_cast<std::size_t>(g.n1) : g.x.size();
  Dataset part;
  part.x.assign(g.x.begin() + lo, g.x.begin() + hi);
  part.y.assign(g.y.begin() + lo, g.y.begin() + hi);
  return suff_stats(part);
}

OlsFit ols_linear(const SuffStatsRaw& s) {
  const double var_x = s.var_x();
  if (!(var_x > 0.0)) throw SingularDesign("x has zero sample variance");
  OlsFit fit;
  fit.beta1 = s.cov_xy() / var_x;
  fit.beta2 = (s.ybar * s.x2bar - s.xbar * s.xybar) / var_x;
  // Exact inputs guarantee rss >= 0; clamp the roundoff of a perfect fit.
  fit.rss = std::max(0.0, rss_from_moments(s, fit.beta1, fit.beta2));
  fit.s2 = fit.rss / static_cast<double>(s.n - kModelRank);
  return fit;
}

double f_stat_linear(const OlsFit& fit, const SuffStatsRaw& s) {
  if (!(fit.s2 > 0.0)) throw ZeroVariance("perfect fit: residual variance is zero");
  return fit.beta1 * fit.beta1 * static_cast<double>(s.n) * s.var_x() / fit.s2;
}

OlsFit ols_mixture(const GroupedDataset& g) {
  const SuffStatsRaw s1 = suff_stats_group(g, 1);
  const SuffStatsRaw s2 = suff_stats_group(g, 2);
  if (!(s1.x2bar > 0.0) || !(s2.x2bar > 0.0))
    throw SingularDesign("a group's x values are all zero");
  OlsFit fit;
  fit.beta1 = s1.xybar / s1.x2bar;
  fit.beta2 = s2.xybar / s2.x2bar;
  // Group-wise moment identity for the no-intercept model:
  // rss_g = n_g*(y2bar_g - 2 b_g xybar_g + b_g^2 x2bar_g).
  const auto group_rss = [](const SuffStatsRaw& s, double b) {
    return static_cast<double>(s.n) * (s.y2bar - 2.0 * b * s.xybar + b * b * s.x2bar);
  };
  fit.rss = std::max(0.0, group_rss(s1, fit.beta1) + group_rss(s2, fit.beta2));
  fit.s2 = fit.rss / static_cast<double>(g.n() - kModelRank);
  return fit;
}

double f_stat_mixture(const OlsFit& fit, const MixtureMoments& m) {
  if (!(fit.s2 > 0.0)) throw ZeroVariance("perfect fit: residual variance is zero");
  const double pooled = m.x2bar();
  if (!(pooled > 0.0)) throw SingularDesign("pooled second moment is not positive");
  const double diff = fit.beta1 - fit.beta2;
  const double n1x = static_cast<double>(m.n1) * m.x2bar1;
  const double n2x = static_cast<double>(m.n2) * m.x2bar2;
  return n1x * n2x / (fit.s2 * static_cast<double>(m.n()) * pooled) * diff * diff;
}

EFGDecomposition efg_decompose(const SuffStatsRaw& s) {
  const double var_x = s.var_x();
  if (var_x < 0.0) throw NegativeVariance("x2bar - xbar^2 is negative");
  // Closed-form PSD square root of [[1, xbar], [xbar, x2bar]]:
  // E = ([[1 + sv, xbar], [xbar, x2bar + sv]]) / sqrt(x2bar + 1 + 2*sv),
  // with sv = sqrt(var_x).
  const double sv = std::sqrt(var_x);
  const double scale = 1.0 / std::sqrt(s.x2bar + 1.0 + 2.0 * sv);
  EFGDecomposition d;
  d.E[0][0] = scale * (1.0 + sv);
  d.E[0][1] = scale * s.xbar;
  d.E[1][0] = scale * s.xbar;
  d.E[1][1] = scale * (s.x2bar + sv);
  d.F[0] = s.ybar;
  d.F[1] = s.xybar;
  d.G = s.y2bar;
  return d;
}

double f_stat_reformulated(const EFGDecomposition& e, const std::array<double, 2>& beta,
                           const std::array<double, 2>& beta_null, std::int64_t n,
                           int r, int q) {
  const double d0 = beta[0] - beta_null[0];
  const double d1 = beta[1] - beta_null[1];
  // v = E (beta - betaN)
  const double v0 = e.E[0][0] * d0 + e.E[0][1] * d1;
  const double v1 = e.E[1][0] * d0 + e.E[1][1] * d1;
  // w = E beta, so beta'E^2 beta = ||w||^2
  const double w0 = e.E[0][0] * beta[0] + e.E[0][1] * beta[1];
  const double w1 = e.E[1][0] * beta[0] + e.E[1][1] * beta[1];
  const double quad = w0 * w0 + w1 * w1 - 2.0 * (beta[0] * e.F[0] + beta[1] * e.F[1]) + e.G;
  const double nn = static_cast<double>(n);
  const double denom = nn * quad;
  if (!(denom > 0.0)) throw NonpositiveDenominator("reformulated denominator <= 0");
  const double num = nn * (v0 * v0 + v1 * v1);
  return (static_cast<double>(n - r) / static_cast<double>(r - q)) * num / denom;
}

}  // namespace dplr

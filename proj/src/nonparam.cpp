#include "dplr/nonparam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dplr/distributions.hpp"
#include "dplr/errors.hpp"

namespace dplr {

PairedSlopes paired_slopes(const std::vector<double>& x, const std::vector<double>& y,
                           RandomSource& rng) {
  if (x.size() != y.size()) {
    throw InvalidSpec("paired_slopes: x and y length mismatch");
  }
  const std::size_t size = x.size();
  const std::size_t half = size / 2;

  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx.begin(), idx.end());

  bool have_spare = (size % 2) != 0;
  std::size_t spare = have_spare ? idx[size - 1] : std::size_t{0};

  PairedSlopes out;
  out.pairs_used = half;
  out.slopes.reserve(half);
  for (std::size_t j = 0; j < half; ++j) {
    const std::size_t a = idx[j];
    std::size_t b = idx[j + half];
    if (x[a] == x[b] && have_spare) {
      b = spare;
      have_spare = false;
    }
    if (x[a] == x[b]) {
      continue;  // still degenerate: drop the pair
    }
    out.slopes.push_back((y[b] - y[a]) / (x[b] - x[a]));
  }
  return out;
}

namespace {

// Midranks, 1-based: tied values all receive the average of the positions
// they occupy in the sorted order.
std::vector<double> midranks(const std::vector<double>& v) {
  const std::size_t m = v.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

  std::vector<double> ranks(m, 0.0);
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

KWStatistic kw_statistic(const std::vector<double>& s1, const std::vector<double>& s2) {
  if (s1.empty() || s2.empty()) {
    throw InvalidSpec("kw_statistic: both groups need at least one slope");
  }
  std::vector<double> pooled;
  pooled.reserve(s1.size() + s2.size());
  pooled.insert(pooled.end(), s1.begin(), s1.end());
  pooled.insert(pooled.end(), s2.begin(), s2.end());
  const std::vector<double> ranks = midranks(pooled);

  const std::size_t m1 = s1.size();
  const std::size_t m2 = s2.size();
  const double md = static_cast<double>(m1 + m2);

  double sum1 = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < m1; ++i) sum1 += ranks[i];
  for (std::size_t i = m1; i < m1 + m2; ++i) sum2 += ranks[i];
  const double rbar1 = sum1 / static_cast<double>(m1);
  const double rbar2 = sum2 / static_cast<double>(m2);
  const double mid = (md + 1.0) / 2.0;

  KWStatistic out;
  out.m1 = static_cast<std::int64_t>(m1);
  out.m2 = static_cast<std::int64_t>(m2);
  out.h = 4.0 * (md - 1.0) / (md * md) *
          (static_cast<double>(m1) * std::abs(rbar1 - mid) +
           static_cast<double>(m2) * std::abs(rbar2 - mid));
  return out;
}

std::optional<KWThetas> KWTester::dp_stats(const GroupedDataset& g,
                                           const PrivacyBudget& budget,
                                           const ClipBound& /*delta*/,
                                           RandomSource& rng) const {
  std::vector<double> x1(g.x.begin(), g.x.begin() + static_cast<std::ptrdiff_t>(g.n1));
  std::vector<double> y1(g.y.begin(), g.y.begin() + static_cast<std::ptrdiff_t>(g.n1));
  std::vector<double> x2(g.x.begin() + static_cast<std::ptrdiff_t>(g.n1), g.x.end());
  std::vector<double> y2(g.y.begin() + static_cast<std::ptrdiff_t>(g.n1), g.y.end());

  PairedSlopes p1 = paired_slopes(x1, y1, rng);
  PairedSlopes p2 = paired_slopes(x2, y2, rng);
  if (p1.slopes.empty() || p2.slopes.empty()) {
    return std::nullopt;  // no slopes in some group: statistic undefined
  }
  KWStatistic stat = kw_statistic(p1.slopes, p2.slopes);
  stat.h_noisy = gaussian_mech(stat.h, 8.0, budget, rng);

  KWThetas out;
  out.null_theta = KWNullTheta{g.n1, g.n2(), lo, hi};
  out.alt_theta = KWAltTheta{stat.h_noisy};
  return out;
}

GroupedDataset KWTester::sample_null(const KWNullTheta& theta0,
                                     RandomSource& rng) const {
  GroupedDataset g;
  g.n1 = theta0.n1;
  const std::size_t n = static_cast<std::size_t>(theta0.n1 + theta0.n2);
  g.x.resize(n);
  g.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.x[i] = rng.uniform(theta0.lo, theta0.hi);
    g.y[i] = rng.uniform(theta0.lo, theta0.hi);
  }
  return g;
}

Decision kw_test(const GroupedDataset& g, const PrivacyBudget& budget,
                 const MCConfig& cfg, RandomSource& rng, double interval_lo,
                 double interval_hi) {
  if (g.n1 < 2 || g.n2() < 2) {
    throw InvalidSpec("kw_test requires at least 2 rows per group");
  }
  if (!(interval_lo < interval_hi)) {
    throw InvalidBounds("kw_test: interval_lo must be < interval_hi");
  }
  KWTester tester;
  tester.lo = interval_lo;
  tester.hi = interval_hi;
  return mc_test(tester, g, budget, ClipBound(1.0), cfg, rng);
}

Decision bernoulli_test(const Dataset& d, const PrivacyBudget& budget, double alpha,
                        RandomSource& rng) {
  const std::size_t n = d.x.size();
  if (n < 2) {
    throw InvalidSpec("bernoulli_test requires n >= 2");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidSpec("alpha must be in (0,1)");
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx.begin(), idx.end());

  const std::size_t ns = n / 2;
  double s = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    const std::size_t a = idx[i];
    const std::size_t b = idx[ns + i];
    if (d.x[a] == d.x[b]) {
      if (rng.uniform() < 0.5) s += 1.0;
    } else if ((d.y[b] - d.y[a]) / (d.x[b] - d.x[a]) > 0.0) {
      s += 1.0;
    }
  }

  const double s_noisy = gaussian_mech(s, 1.0, budget, rng);

  const double nsd = static_cast<double>(ns);
  const double mean = nsd / 2.0;
  const double sd = std::sqrt(nsd / 4.0 + 1.0 / (2.0 * budget.rho()));
  const double lo = mean + sd * normal_quantile(alpha / 2.0);
  const double hi = mean + sd * normal_quantile(1.0 - alpha / 2.0);

  Decision out;
  out.statistic = s_noisy;
  out.ci_lo = lo;
  out.ci_hi = hi;
  if (s_noisy < lo || s_noisy > hi) {
    out.outcome = Outcome::Reject;
    out.reason = DecisionReason::CIExclusion;
    out.threshold = s_noisy < lo ? lo : hi;
  } else {
    out.outcome = Outcome::FailToReject;
    out.reason = DecisionReason::CIInclusion;
    out.threshold = hi;
  }
  return out;
}

}  // namespace dplr

// Nonparametric private testers: the slope-sign linear-relationship test and
// the rank-based two-group mixture test.
//
// Both work on random disjoint pairs of datapoints, so one changed row can
// affect at most one pair-slope -- the 1-Lipschitz property their sensitivity
// arguments rely on.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dplr/dp.hpp"
#include "dplr/linmodel.hpp"
#include "dplr/mc.hpp"
#include "dplr/random.hpp"

namespace dplr {

// Slopes of randomly formed disjoint pairs within one group.
//
// Construction: shuffle the indices, pair position j with position
// j + floor(size/2); with odd size the last shuffled position is the spare
// (one uniformly random point dropped). A pair with equal x values is redrawn
// once by swapping the spare in for its second member (when a spare exists
// and is unused); if the x values are still equal the pair is dropped, so
// slopes.size() can be smaller than pairs_used.
struct PairedSlopes {
  std::vector<double> slopes;
  std::size_t pairs_used = 0;  // floor(group size / 2), before tie drops
};

PairedSlopes paired_slopes(const std::vector<double>& x, const std::vector<double>& y,
                           RandomSource& rng);

// Rank statistic over the pooled pair-slopes of the two groups.
struct KWStatistic {
  double h = 0.0;        // pre-noise statistic
  double h_noisy = 0.0;  // filled by the private release, 0 until then
  std::int64_t m1 = 0;   // slope count, group 1
  std::int64_t m2 = 0;   // slope count, group 2
};

// h = 4(m-1)/m^2 * (m1*|rbar1 - (m+1)/2| + m2*|rbar2 - (m+1)/2|), where the
// ranks 1..m (midranks on ties) are taken over the concatenation of the two
// slope sets, m = m1 + m2, and rbar_j is the mean rank of group j. Symmetric
// in group exchange; requires m1 >= 1 and m2 >= 1.
KWStatistic kw_statistic(const std::vector<double>& s1, const std::vector<double>& s2);

// MC-framework plumbing for the rank test. The private release is
// h + N(0, 8^2/(2 rho)) on the full budget (statistic sensitivity 8); there is
// no clipping, so the ClipBound parameter is ignored. The null bundle records
// only the group sizes and the sampling interval: under the null the rank
// distribution of the pair-slopes does not depend on the data distribution,
// so null datasets draw x and y i.i.d. uniform on [lo, hi] for both groups.
// Bottom when every pair in some group was dropped (no slopes to rank).
struct KWNullTheta {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  double lo = -5.0;
  double hi = 5.0;
};

struct KWAltTheta {
  double h_noisy = 0.0;
};

struct KWThetas {
  KWNullTheta null_theta;
  KWAltTheta alt_theta;
};

struct KWTester {
  using Data = GroupedDataset;
  using Thetas = KWThetas;

  double lo = -5.0;  // null-sampler interval
  double hi = 5.0;

  std::optional<KWThetas> dp_stats(const GroupedDataset& g, const PrivacyBudget& budget,
                                   const ClipBound& delta, RandomSource& rng) const;
  double statistic(const KWAltTheta& theta1) const { return theta1.h_noisy; }
  GroupedDataset sample_null(const KWNullTheta& theta0, RandomSource& rng) const;
};

// Rank-based test for equal slopes across the two groups, calibrated by
// mc_test. Requires at least 2 rows per group.
Decision kw_test(const GroupedDataset& g, const PrivacyBudget& budget,
                 const MCConfig& cfg, RandomSource& rng, double interval_lo = -5.0,
                 double interval_hi = 5.0);

// Slope-sign test for any linear relationship, self-contained (no MC
// calibration). A random permutation forms floor(n/2) disjoint pairs; s counts
// pairs with positive slope, with a fair coin on equal x values; the release
// is s + N(0, 1/(2 rho)) on the full budget (count sensitivity 1). Rejects
// when the noisy count falls outside the (alpha/2, 1-alpha/2) quantiles of
// N(n_s/2, n_s/4 + 1/(2 rho)), the null approximation of the noisy count.
// Decision carries the noisy count as statistic, the interval in ci_lo/ci_hi,
// the violated bound (or the upper bound when failing to reject) as
// threshold, and reason CIExclusion/CIInclusion. Requires n >= 2.
Decision bernoulli_test(const Dataset& d, const PrivacyBudget& budget, double alpha,
                        RandomSource& rng);

}  // namespace dplr

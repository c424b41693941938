// Experiment meta-procedures: estimate a tester's rejection probability over
// repeated draws from a data sampler, compare sampler/tester grids, and check
// the large-n distributional limit of the private statistic.
//
// Trials fan out across worker threads with per-trial RandomSource substreams
// (trial t uses rng.substream(t)); the aggregate is a count, so results are
// identical for any worker count and bit-reproducible given the seed.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dplr/data_io.hpp"
#include "dplr/dp.hpp"
#include "dplr/mc.hpp"
#include "dplr/random.hpp"
#include "dplr/suffstat_testers.hpp"

namespace dplr {

// One experiment cell: a tester run `trials` times against a sampler.
struct RejectionEstimate {
  std::string tester;
  GeneratorSpec spec;
  double rho = 0.0;    // +infinity for non-private testers
  double delta = 0.0;  // 0 when the tester does not clip
  double alpha = 0.05;
  int K = 0;  // 0 when the tester has no Monte Carlo calibration
  int trials = 0;
  int rejects = 0;
  double rate = 0.0;     // rejects / trials
  double std_err = 0.0;  // sqrt(rate * (1 - rate) / trials)
};

// A dataset source. `draw` defaults to generating from `spec`; tests may
// substitute any other source, in which case `spec` still labels the rows of
// the results CSV (its n should match what `draw` produces).
struct NamedSampler {
  std::string name;
  GeneratorSpec spec;
  std::function<AnyDataset(RandomSource&)> draw;
};

NamedSampler make_sampler(std::string name, const GeneratorSpec& spec);

// A decision procedure plus the parameters echoed into result records.
// `run` must be safe to call concurrently from several threads.
struct NamedTester {
  std::string name;
  double rho = 0.0;
  double delta = 0.0;
  double alpha = 0.05;
  int K = 0;
  std::function<Decision(const AnyDataset&, RandomSource&)> run;
};

// Non-private reference tests: reject when the exact statistic exceeds the
// central F(1, n-2) quantile at probability 1 - alpha. Decision carries
// statistic and threshold; reason is left unset (plain threshold test).
Decision non_private_linear_f_test(const Dataset& d, double alpha);
Decision non_private_mixture_f_test(const GroupedDataset& g, double alpha);

// Tester factories. Linear-design testers ("linear-f", "bernoulli", "ci",
// "nonprivate-f") accept grouped data by flattening it to plain rows; the
// two-group testers ("mixture-f", "kw", "nonprivate-mixture-f") require
// grouped data and throw InvalidSpec otherwise. Factory lambdas convert
// degenerate-data exceptions from the exact tests into a conservative
// FailToReject (reason DegenerateStat) so meta-experiments never abort on a
// measure-zero draw.
NamedTester make_tester_linear_f(const PrivacyBudget& budget, const ClipBound& delta,
                                 const MCConfig& cfg);
NamedTester make_tester_mixture_f(const PrivacyBudget& budget, const ClipBound& delta,
                                  const MCConfig& cfg,
                                  MixtureNullSlope mode = MixtureNullSlope::Pooled);
NamedTester make_tester_bernoulli(const PrivacyBudget& budget, double alpha);
NamedTester make_tester_kw(const PrivacyBudget& budget, const MCConfig& cfg,
                           double interval_lo = -5.0, double interval_hi = 5.0);
NamedTester make_tester_ci(const PrivacyBudget& budget, const ClipBound& delta,
                           const MCConfig& cfg, double target_slope);
NamedTester make_tester_non_private_f(double alpha);
NamedTester make_tester_non_private_mixture_f(double alpha);

// Runs `trials` independent (draw -> decide) trials and reports the rejection
// rate with its binomial standard error. jobs >= 1 caps the worker threads;
// the result is identical for every jobs value.
RejectionEstimate estimate_rejection_prob(const NamedSampler& sampler,
                                          const NamedTester& tester, int trials,
                                          RandomSource& rng, int jobs = 1);

// Full sampler x tester cross product in stable (sampler-major) order. Each
// cell gets its own substream of rng, so adding a cell never perturbs others.
std::vector<RejectionEstimate> compare_algorithms(
    const std::vector<NamedSampler>& samplers, const std::vector<NamedTester>& testers,
    int trials, RandomSource& rng, int jobs = 1);

// Large-n distributional check: draws `samples` independent values of the
// statistic (fresh data and fresh noise each time) and measures the
// Kolmogorov-Smirnov distance to the noncentral chi-square(1, eta_sq)
// reference, eta_sq = slope^2 * n * Var(x) / sigma_e^2 computed from the
// generator's analytic parameters (zero under the null).
struct ConvergenceReport {
  std::int64_t n = 0;
  double rho = 0.0;  // +infinity when the exact statistic was sampled
  double delta = 0.0;
  int samples = 0;
  double ks_distance = 0.0;
  double mean = 0.0;      // sample mean of the statistic
  double variance = 0.0;  // unbiased sample variance
  double eta_sq = 0.0;    // noncentrality of the reference
};

// private_mode=true samples the private statistic through the full release;
// a draw that lands on Bottom (or a degenerate statistic) is redrawn with a
// fresh substream, bounded retries, since the target is the continuous
// limiting distribution at fixed sample count. private_mode=false samples the
// exact statistic with no noise. Linear specs only; requires sigma_e > 0 and
// samples >= 100 (InsufficientSamples below that).
ConvergenceReport convergence_diagnostic(const GeneratorSpec& spec,
                                         const PrivacyBudget& budget,
                                         const ClipBound& delta, int samples,
                                         RandomSource& rng, bool private_mode = true);

}  // namespace dplr

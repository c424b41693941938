#include "dplr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dplr/distributions.hpp"
#include "dplr/errors.hpp"
#include "dplr/nonparam.hpp"

namespace dplr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Dataset flatten(const AnyDataset& data) {
  if (const Dataset* d = std::get_if<Dataset>(&data)) return *d;
  const GroupedDataset& g = std::get<GroupedDataset>(data);
  Dataset d;
  d.x = g.x;
  d.y = g.y;
  return d;
}

const GroupedDataset& as_grouped(const AnyDataset& data, const char* who) {
  if (const GroupedDataset* g = std::get_if<GroupedDataset>(&data)) return *g;
  throw InvalidSpec(std::string(who) + " requires two-group data");
}

Decision conservative_fail() {
  Decision d;
  d.outcome = Outcome::FailToReject;
  d.reason = DecisionReason::DegenerateStat;
  return d;
}

}  // namespace

NamedSampler make_sampler(std::string name, const GeneratorSpec& spec) {
  spec.validate();
  NamedSampler s;
  s.name = std::move(name);
  s.spec = spec;
  s.draw = [spec](RandomSource& rng) { return generate(spec, rng); };
  return s;
}

Decision non_private_linear_f_test(const Dataset& d, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
  const SuffStatsRaw s = suff_stats(d);
  const OlsFit fit = ols_linear(s);
  const double t = f_stat_linear(fit, s);
  const double thresh =
      f_quantile(1.0 - alpha, 1.0, static_cast<double>(s.n) - 2.0);

  Decision out;
  out.statistic = t;
  out.threshold = thresh;
  out.outcome = t > thresh ? Outcome::Reject : Outcome::FailToReject;
  return out;
}

Decision non_private_mixture_f_test(const GroupedDataset& g, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
  const OlsFit fit = ols_mixture(g);
  MixtureMoments m;
  m.x2bar1 = suff_stats_group(g, 1).x2bar;
  m.x2bar2 = suff_stats_group(g, 2).x2bar;
  m.n1 = g.n1;
  m.n2 = g.n2();
  const double t = f_stat_mixture(fit, m);
  const double thresh =
      f_quantile(1.0 - alpha, 1.0, static_cast<double>(g.n()) - 2.0);

  Decision out;
  out.statistic = t;
  out.threshold = thresh;
  out.outcome = t > thresh ? Outcome::Reject : Outcome::FailToReject;
  return out;
}

NamedTester make_tester_linear_f(const PrivacyBudget& budget, const ClipBound& delta,
                                 const MCConfig& cfg) {
  cfg.validate();
  NamedTester t;
  t.name = "linear-f";
  t.rho = budget.rho();
  t.delta = delta.delta();
  t.alpha = cfg.alpha;
  t.K = cfg.K;
  t.run = [budget, delta, cfg](const AnyDataset& data, RandomSource& rng) {
    const Dataset d = flatten(data);
    return mc_test(LinearFTester{}, d, budget, delta, cfg, rng);
  };
  return t;
}

NamedTester make_tester_mixture_f(const PrivacyBudget& budget, const ClipBound& delta,
                                  const MCConfig& cfg, MixtureNullSlope mode) {
  cfg.validate();
  NamedTester t;
  t.name = "mixture-f";
  t.rho = budget.rho();
  t.delta = delta.delta();
  t.alpha = cfg.alpha;
  t.K = cfg.K;
  t.run = [budget, delta, cfg, mode](const AnyDataset& data, RandomSource& rng) {
    const GroupedDataset& g = as_grouped(data, "mixture-f");
    MixtureFTester tester;
    tester.null_slope = mode;
    return mc_test(tester, g, budget, delta, cfg, rng);
  };
  return t;
}

NamedTester make_tester_bernoulli(const PrivacyBudget& budget, double alpha) {
  NamedTester t;
  t.name = "bernoulli";
  t.rho = budget.rho();
  t.delta = 0.0;
  t.alpha = alpha;
  t.K = 0;
  t.run = [budget, alpha](const AnyDataset& data, RandomSource& rng) {
    return bernoulli_test(flatten(data), budget, alpha, rng);
  };
  return t;
}

NamedTester make_tester_kw(const PrivacyBudget& budget, const MCConfig& cfg,
                           double interval_lo, double interval_hi) {
  cfg.validate();
  NamedTester t;
  t.name = "kw";
  t.rho = budget.rho();
  t.delta = 0.0;
  t.alpha = cfg.alpha;
  t.K = cfg.K;
  t.run = [budget, cfg, interval_lo, interval_hi](const AnyDataset& data,
                                                  RandomSource& rng) {
    const GroupedDataset& g = as_grouped(data, "kw");
    return kw_test(g, budget, cfg, rng, interval_lo, interval_hi);
  };
  return t;
}

NamedTester make_tester_ci(const PrivacyBudget& budget, const ClipBound& delta,
                           const MCConfig& cfg, double target_slope) {
  NamedTester t;
  t.name = "ci";
  t.rho = budget.rho();
  t.delta = delta.delta();
  t.alpha = cfg.alpha;
  t.K = cfg.K;
  t.run = [budget, delta, cfg, target_slope](const AnyDataset& data,
                                             RandomSource& rng) {
    return ci_bootstrap_test(flatten(data), budget, delta, cfg, target_slope, rng);
  };
  return t;
}

NamedTester make_tester_non_private_f(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
  NamedTester t;
  t.name = "nonprivate-f";
  t.rho = kInf;
  t.delta = 0.0;
  t.alpha = alpha;
  t.K = 0;
  t.run = [alpha](const AnyDataset& data, RandomSource&) {
    const Dataset flat = flatten(data);
    try {
      return non_private_linear_f_test(flat, alpha);
    } catch (const Error&) {
      return conservative_fail();
    }
  };
  return t;
}

NamedTester make_tester_non_private_mixture_f(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must be in (0,1)");
  NamedTester t;
  t.name = "nonprivate-mixture-f";
  t.rho = kInf;
  t.delta = 0.0;
  t.alpha = alpha;
  t.K = 0;
  t.run = [alpha](const AnyDataset& data, RandomSource&) {
    // A design mismatch is a usage error and must propagate; only failures in
    // evaluating the statistic itself are mapped to a conservative decision.
    const GroupedDataset& g = as_grouped(data, "nonprivate-mixture-f");
    try {
      return non_private_mixture_f_test(g, alpha);
    } catch (const Error&) {
      return conservative_fail();
    }
  };
  return t;
}

RejectionEstimate estimate_rejection_prob(const NamedSampler& sampler,
                                          const NamedTester& tester, int trials,
                                          RandomSource& rng, int jobs) {
  if (trials < 1) throw InvalidSpec("trials must be >= 1");
  if (jobs < 1) throw InvalidSpec("jobs must be >= 1");

  const int workers = std::min(jobs, trials);
  std::vector<long> counts(static_cast<std::size_t>(workers), 0);

  auto work = [&](int w) {
    long local = 0;
    for (int t = w; t < trials; t += workers) {
      RandomSource trial_rng = rng.substream(static_cast<std::uint64_t>(t));
      const AnyDataset data = sampler.draw(trial_rng);
      const Decision decision = tester.run(data, trial_rng);
      if (decision.outcome == Outcome::Reject) ++local;
    }
    counts[static_cast<std::size_t>(w)] = local;
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& th : pool) th.join();
  }

  long rejects = 0;
  for (long c : counts) rejects += c;

  RejectionEstimate out;
  out.tester = tester.name;
  out.spec = sampler.spec;
  out.rho = tester.rho;
  out.delta = tester.delta;
  out.alpha = tester.alpha;
  out.K = tester.K;
  out.trials = trials;
  out.rejects = static_cast<int>(rejects);
  out.rate = static_cast<double>(rejects) / static_cast<double>(trials);
  out.std_err = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(trials));
  return out;
}

std::vector<RejectionEstimate> compare_algorithms(
    const std::vector<NamedSampler>& samplers, const std::vector<NamedTester>& testers,
    int trials, RandomSource& rng, int jobs) {
  std::vector<RejectionEstimate> out;
  out.reserve(samplers.size() * testers.size());
  std::uint64_t cell = 0;
  for (const NamedSampler& s : samplers) {
    for (const NamedTester& t : testers) {
      RandomSource cell_rng = rng.substream(cell++);
      out.push_back(estimate_rejection_prob(s, t, trials, cell_rng, jobs));
    }
  }
  return out;
}

ConvergenceReport convergence_diagnostic(const GeneratorSpec& spec,
                                         const PrivacyBudget& budget,
                                         const ClipBound& delta, int samples,
                                         RandomSource& rng, bool private_mode) {
  if (samples < 100) {
    throw InsufficientSamples("convergence diagnostic needs samples >= 100");
  }
  spec.validate();
  if (spec.is_mixture()) {
    throw InvalidSpec("convergence diagnostic covers the linear design only");
  }
  if (!(spec.sigma_e > 0.0)) {
    throw InvalidSpec("convergence diagnostic requires sigma_e > 0");
  }

  const double eta_sq = spec.slope * spec.slope * static_cast<double>(spec.n) *
                        spec.x_dist.variance() / (spec.sigma_e * spec.sigma_e);

  constexpr int kMaxRetries = 100;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    bool got = false;
    for (int a = 0; a < kMaxRetries && !got; ++a) {
      RandomSource srng = rng.substream(static_cast<std::uint64_t>(a) *
                                            static_cast<std::uint64_t>(samples) +
                                        static_cast<std::uint64_t>(s));
      const Dataset d = generate_linear(spec, srng);
      try {
        if (private_mode) {
          auto thetas = dp_stats_linear(d, budget, delta, srng);
          if (!thetas) continue;  // Bottom: redraw
          values.push_back(private_f_stat_linear(thetas->alt_theta));
        } else {
          const SuffStatsRaw st = suff_stats(d);
          values.push_back(f_stat_linear(ols_linear(st), st));
        }
        got = true;
      } catch (const Error&) {
        continue;  // degenerate draw: redraw
      }
    }
    if (!got) {
      throw Error("convergence diagnostic: no valid statistic after retries");
    }
  }

  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(samples);
  double ks = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double cdf = noncentral_chi2_cdf(values[static_cast<std::size_t>(i)], 1.0,
                                           eta_sq);
    const double lo = static_cast<double>(i) / m;
    const double hi = static_cast<double>(i + 1) / m;
    ks = std::max(ks, std::max(cdf - lo, hi - cdf));
  }

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (m - 1.0);

  ConvergenceReport rep;
  rep.n = spec.n;
  rep.rho = private_mode ? budget.rho() : kInf;
  rep.delta = private_mode ? delta.delta() : 0.0;
  rep.samples = samples;
  rep.ks_distance = ks;
  rep.mean = mean;
  rep.variance = var;
  rep.eta_sq = eta_sq;
  return rep;
}

}  // namespace dplr

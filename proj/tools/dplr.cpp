// Command-line surface: run one private hypothesis test, sweep rejection
// rates over a privacy-budget grid, or sample the statistic's distribution
// against its large-n limit. Every run prints its fully resolved
// configuration and seed, and all randomness flows from --seed, so any output
// is bit-reproducible.
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dplr/data_io.hpp"
#include "dplr/dp.hpp"
#include "dplr/errors.hpp"
#include "dplr/harness.hpp"
#include "dplr/mc.hpp"
#include "dplr/nonparam.hpp"
#include "dplr/random.hpp"

namespace {

using namespace dplr;

// Flag-level mistakes (exit 2), as opposed to data problems (exit 3).
struct UsageError {
  std::string message;
};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string reason_name(const std::optional<DecisionReason>& r) {
  if (!r) return "none";
  switch (*r) {
    case DecisionReason::RankExceeded: return "rank-exceeded";
    case DecisionReason::BottomTheta: return "bottom-theta";
    case DecisionReason::DegenerateStat: return "degenerate-stat";
    case DecisionReason::CIExclusion: return "ci-exclusion";
    case DecisionReason::CIInclusion: return "ci-inclusion";
  }
  return "none";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Generator flags shared by the subcommands.
struct GenFlags {
  std::int64_t n = 100;
  double slope = 0.0;
  double intercept = 0.0;
  double sigma_e = 1.0;
  std::string x_dist = "normal";
  double x_p1 = 0.5;
  double x_p2 = 1.0;
  double slope2 = 0.0;
  bool slope2_given = false;
  double frac1 = 0.5;
};

void add_gen_flags(CLI::App* cmd, GenFlags& g, std::vector<CLI::Option*>& opts) {
  opts.push_back(cmd->add_option("--n", g.n, "Generated sample size (>= 4)")
                     ->capture_default_str());
  opts.push_back(cmd->add_option("--slope", g.slope, "True slope beta1")
                     ->capture_default_str());
  opts.push_back(
      cmd->add_option("--intercept", g.intercept, "True intercept beta2 (linear only)")
          ->capture_default_str());
  opts.push_back(cmd->add_option("--sigma-e", g.sigma_e, "Error standard deviation")
                     ->capture_default_str());
  opts.push_back(cmd->add_option("--x-dist", g.x_dist, "Distribution of x")
                     ->check(CLI::IsMember({"normal", "uniform", "exponential",
                                            "lognormal"}))
                     ->capture_default_str());
  opts.push_back(
      cmd->add_option("--x-p1", g.x_p1,
                      "First x parameter (mean / lo / scale / mu by distribution)")
          ->capture_default_str());
  opts.push_back(
      cmd->add_option("--x-p2", g.x_p2,
                      "Second x parameter (sd / hi / unused / sigma by distribution)")
          ->capture_default_str());
  opts.push_back(
      cmd->add_option("--slope2", g.slope2,
                      "Group-2 slope for two-group data (default: equal to --slope)")
          ->capture_default_str());
  opts.push_back(cmd->add_option("--frac1", g.frac1,
                                 "Fraction of rows in group 1 for two-group data")
                     ->capture_default_str());
}

XDist make_xdist(const GenFlags& g) {
  if (g.x_dist == "normal") return XDist::normal(g.x_p1, g.x_p2);
  if (g.x_dist == "uniform") return XDist::uniform(g.x_p1, g.x_p2);
  if (g.x_dist == "exponential") return XDist::exponential(g.x_p1);
  return XDist::lognormal(g.x_p1, g.x_p2);
}

GeneratorSpec make_spec(const GenFlags& g, bool mixture) {
  GeneratorSpec spec;
  spec.x_dist = make_xdist(g);
  spec.slope = g.slope;
  spec.intercept = g.intercept;
  spec.sigma_e = g.sigma_e;
  spec.n = g.n;
  if (mixture) {
    spec.mixture = MixturePart{g.slope2_given ? g.slope2 : g.slope, g.frac1};
  }
  try {
    spec.validate();
  } catch (const InvalidSpec& e) {
    throw UsageError{e.what()};
  }
  return spec;
}

std::string gen_summary(const GeneratorSpec& s) {
  std::string out = "generator: n=" + std::to_string(s.n) + " x-dist=";
  switch (s.x_dist.kind) {
    case XDist::Kind::Normal: out += "normal"; break;
    case XDist::Kind::Uniform: out += "uniform"; break;
    case XDist::Kind::Exponential: out += "exponential"; break;
    case XDist::Kind::LogNormal: out += "lognormal"; break;
  }
  out += "(" + fmt6(s.x_dist.a) + "," + fmt6(s.x_dist.b) + ")";
  out += " slope=" + fmt6(s.slope);
  if (s.is_mixture()) {
    out += " slope2=" + fmt6(s.mixture->slope2) + " frac1=" + fmt6(s.mixture->frac1);
  } else {
    out += " intercept=" + fmt6(s.intercept);
  }
  out += " sigma-e=" + fmt6(s.sigma_e);
  return out;
}

void print_decision(const Decision& d) {
  std::printf("decision: %s\n",
              d.outcome == Outcome::Reject ? "Reject" : "FailToReject");
  std::printf("statistic: %s\n",
              d.statistic ? fmt6(*d.statistic).c_str() : "n/a");
  std::printf("threshold: %s\n",
              d.threshold ? fmt6(*d.threshold).c_str() : "n/a");
  std::printf("reason: %s\n", reason_name(d.reason).c_str());
  std::printf("approx-p: %s\n", d.approx_p ? fmt6(*d.approx_p).c_str() : "n/a");
  if (d.ci_lo && d.ci_hi) {
    std::printf("interval: [%s, %s]\n", fmt6(*d.ci_lo).c_str(),
                fmt6(*d.ci_hi).c_str());
  }
}

void write_decision_record(const std::string& path, const std::string& tester,
                           const Decision& d) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open " + path + " for writing");
  std::fprintf(f, "tester,outcome,statistic,threshold,reason,approx_p,ci_lo,ci_hi\n");
  std::fprintf(f, "%s,%s,%s,%s,%s,%s,%s,%s\n", tester.c_str(),
               d.outcome == Outcome::Reject ? "Reject" : "FailToReject",
               d.statistic ? fmt6(*d.statistic).c_str() : "",
               d.threshold ? fmt6(*d.threshold).c_str() : "",
               reason_name(d.reason).c_str(),
               d.approx_p ? fmt6(*d.approx_p).c_str() : "",
               d.ci_lo ? fmt6(*d.ci_lo).c_str() : "",
               d.ci_hi ? fmt6(*d.ci_hi).c_str() : "");
  std::fclose(f);
}

bool is_grouped_tester(const std::string& name) {
  return name == "mixture-f" || name == "kw" || name == "nonprivate-mixture-f";
}

// ---- test ----------------------------------------------------------------

struct TestArgs {
  std::string tester;
  std::string input, x_col, y_col, group_col;
  GenFlags gen;
  double rho = 0.5;
  double delta = 2.0;
  double alpha = 0.05;
  int K = 1000;
  double target_slope = 0.0;
  std::string null_slope = "pooled";
  double kw_lo = -5.0, kw_hi = 5.0;
  bool redraw_bottom = false;
  std::uint64_t seed = 1;
  std::string out;
  bool file_source = false;
  bool has_group = false;
};

int run_test(const TestArgs& a) {
  if (!(a.rho > 0.0)) throw UsageError{"--rho must be > 0"};
  if (!(a.delta > 0.0)) throw UsageError{"--delta must be > 0"};
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError{"--alpha must be in (0,1)"};
  const bool grouped = is_grouped_tester(a.tester);
  if (grouped && a.file_source && !a.has_group) {
    throw UsageError{"tester '" + a.tester + "' needs --group with --input"};
  }

  MCConfig cfg;
  cfg.K = a.K;
  cfg.alpha = a.alpha;
  cfg.bottom_sim =
      a.redraw_bottom ? BottomSimPolicy::Redraw : BottomSimPolicy::MinusInfinity;
  if (a.tester == "linear-f" || a.tester == "mixture-f" || a.tester == "kw" ||
      a.tester == "ci") {
    try {
      cfg.validate();
      if (a.tester == "ci" && (static_cast<double>(cfg.K) + 1.0) * cfg.alpha <= 2.0) {
        throw InvalidSpec("need (K+1)*alpha > 2 for the interval tester");
      }
    } catch (const InvalidSpec& e) {
      throw UsageError{e.what()};
    }
  }

  RandomSource root(a.seed, 0);
  RandomSource data_rng = root.substream(0);
  RandomSource test_rng = root.substream(1);

  std::printf("run: test tester=%s source=%s seed=%llu\n", a.tester.c_str(),
              a.file_source ? "file" : "generator",
              static_cast<unsigned long long>(a.seed));

  AnyDataset data;
  if (a.file_source) {
    data = read_csv(a.input, a.x_col, a.y_col,
                    a.has_group ? std::optional<std::string>(a.group_col)
                                : std::nullopt);
    if (const Dataset* d = std::get_if<Dataset>(&data)) {
      std::printf("data: file=%s x=%s y=%s rows=%lld\n", a.input.c_str(),
                  a.x_col.c_str(), a.y_col.c_str(),
                  static_cast<long long>(d->n()));
    } else {
      const GroupedDataset& g = std::get<GroupedDataset>(data);
      std::printf("data: file=%s x=%s y=%s group=%s rows=%lld groups=%lld,%lld\n",
                  a.input.c_str(), a.x_col.c_str(), a.y_col.c_str(),
                  a.group_col.c_str(), static_cast<long long>(g.n()),
                  static_cast<long long>(g.n1), static_cast<long long>(g.n2()));
    }
  } else {
    const GeneratorSpec spec = make_spec(a.gen, grouped);
    std::printf("%s\n", gen_summary(spec).c_str());
    data = generate(spec, data_rng);
  }

  const PrivacyBudget budget(a.rho);
  const ClipBound delta(a.delta);
  std::printf("params: rho=%s delta=%s alpha=%s K=%d bottom-redraw=%d\n",
              fmt6(a.rho).c_str(), fmt6(a.delta).c_str(), fmt6(a.alpha).c_str(),
              a.K, a.redraw_bottom ? 1 : 0);

  NamedTester tester;
  if (a.tester == "linear-f") {
    tester = make_tester_linear_f(budget, delta, cfg);
  } else if (a.tester == "mixture-f") {
    const MixtureNullSlope mode = a.null_slope == "group1" ? MixtureNullSlope::Group1
                                                           : MixtureNullSlope::Pooled;
    tester = make_tester_mixture_f(budget, delta, cfg, mode);
  } else if (a.tester == "bernoulli") {
    tester = make_tester_bernoulli(budget, a.alpha);
  } else if (a.tester == "kw") {
    if (!(a.kw_lo < a.kw_hi)) throw UsageError{"--kw-lo must be < --kw-hi"};
    tester = make_tester_kw(budget, cfg, a.kw_lo, a.kw_hi);
  } else {  // ci
    std::printf("target-slope: %s\n", fmt6(a.target_slope).c_str());
    tester = make_tester_ci(budget, delta, cfg, a.target_slope);
  }

  const Decision d = tester.run(data, test_rng);
  print_decision(d);
  if (!a.out.empty()) {
    write_decision_record(a.out, a.tester, d);
    std::printf("record: %s\n", a.out.c_str());
  }
  return 0;
}

// ---- experiment ------------------------------------------------------------

struct ExperimentArgs {
  std::string mode;
  GenFlags gen;
  std::string testers = "linear-f";
  std::string rho_grid = "0.005,0.125,0.5,1.125,2.0";
  int trials = 2000;
  double delta = 2.0;
  double alpha = 0.05;
  int K = 1000;
  double target_slope = 0.0;
  std::string null_slope = "pooled";
  double kw_lo = -5.0, kw_hi = 5.0;
  bool redraw_bottom = false;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out = "results.csv";
};

int run_experiment(const ExperimentArgs& a) {
  if (a.trials < 1) throw UsageError{"--trials must be >= 1"};
  if (a.jobs < 1) throw UsageError{"--jobs must be >= 1"};
  if (!(a.delta > 0.0)) throw UsageError{"--delta must be > 0"};
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError{"--alpha must be in (0,1)"};

  const std::vector<std::string> tester_names = split_list(a.testers);
  if (tester_names.empty()) throw UsageError{"--testers list is empty"};
  static const std::vector<std::string> kKnown = {
      "linear-f", "mixture-f",    "bernoulli",
      "kw",       "ci",           "nonprivate-f",
      "nonprivate-mixture-f"};
  for (const std::string& t : tester_names) {
    bool ok = false;
    for (const std::string& k : kKnown) ok = ok || k == t;
    if (!ok) throw UsageError{"unknown tester '" + t + "'"};
  }

  std::vector<double> grid;
  for (const std::string& tok : split_list(a.rho_grid)) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !(v > 0.0)) {
      throw UsageError{"bad --rho-grid entry '" + tok + "'"};
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw UsageError{"--rho-grid is empty"};

  MCConfig cfg;
  cfg.K = a.K;
  cfg.alpha = a.alpha;
  cfg.bottom_sim =
      a.redraw_bottom ? BottomSimPolicy::Redraw : BottomSimPolicy::MinusInfinity;
  try {
    cfg.validate();
  } catch (const InvalidSpec& e) {
    throw UsageError{e.what()};
  }

  const bool significance = a.mode == "significance";
  const ClipBound delta(a.delta);
  const MixtureNullSlope mode = a.null_slope == "group1" ? MixtureNullSlope::Group1
                                                         : MixtureNullSlope::Pooled;

  std::printf("run: experiment mode=%s seed=%llu trials=%d jobs=%d out=%s\n",
              a.mode.c_str(), static_cast<unsigned long long>(a.seed), a.trials,
              a.jobs, a.out.c_str());
  std::printf("params: delta=%s alpha=%s K=%d rho-grid=%s bottom-redraw=%d\n",
              fmt6(a.delta).c_str(), fmt6(a.alpha).c_str(), a.K,
              a.rho_grid.c_str(), a.redraw_bottom ? 1 : 0);

  RandomSource root(a.seed, 0);
  std::vector<RejectionEstimate> rows;
  std::uint64_t cell = 0;
  for (const std::string& name : tester_names) {
    const bool grouped = is_grouped_tester(name);

    // Under "significance" every tester is run against its own null.
    GenFlags gf = a.gen;
    double target = a.target_slope;
    if (significance) {
      if (name == "ci") {
        target = gf.slope;  // null: the true slope equals the tested value
      } else if (grouped) {
        gf.slope2 = gf.slope;  // null: both groups share one slope
        gf.slope2_given = true;
      } else {
        gf.slope = 0.0;  // null: no linear relationship
      }
    }
    const GeneratorSpec spec = make_spec(gf, grouped);
    const NamedSampler sampler = make_sampler(name + "-data", spec);
    std::printf("%s\n", gen_summary(spec).c_str());

    const bool non_private = name == "nonprivate-f" || name == "nonprivate-mixture-f";
    for (double rho : grid) {
      NamedTester tester;
      if (name == "linear-f") {
        tester = make_tester_linear_f(PrivacyBudget(rho), delta, cfg);
      } else if (name == "mixture-f") {
        tester = make_tester_mixture_f(PrivacyBudget(rho), delta, cfg, mode);
      } else if (name == "bernoulli") {
        tester = make_tester_bernoulli(PrivacyBudget(rho), a.alpha);
      } else if (name == "kw") {
        if (!(a.kw_lo < a.kw_hi)) throw UsageError{"--kw-lo must be < --kw-hi"};
        tester = make_tester_kw(PrivacyBudget(rho), cfg, a.kw_lo, a.kw_hi);
      } else if (name == "ci") {
        if ((static_cast<double>(cfg.K) + 1.0) * cfg.alpha <= 2.0) {
          throw UsageError{"need (K+1)*alpha > 2 for the interval tester"};
        }
        tester = make_tester_ci(PrivacyBudget(rho), delta, cfg, target);
      } else if (name == "nonprivate-f") {
        tester = make_tester_non_private_f(a.alpha);
      } else {
        tester = make_tester_non_private_mixture_f(a.alpha);
      }

      RandomSource cell_rng = root.substream(cell++);
      const RejectionEstimate est =
          estimate_rejection_prob(sampler, tester, a.trials, cell_rng, a.jobs);
      std::printf("cell: tester=%s rho=%s rate=%s stderr=%s\n", name.c_str(),
                  non_private ? "inf" : fmt6(rho).c_str(), fmt6(est.rate).c_str(),
                  fmt6(est.std_err).c_str());
      rows.push_back(est);
      if (non_private) break;  // rho-independent: one row only
    }
  }

  write_results_csv(rows, a.out);
  std::printf("wrote: %s (%zu rows)\n", a.out.c_str(), rows.size());
  return 0;
}

// ---- diagnostic ------------------------------------------------------------

struct DiagnosticArgs {
  GenFlags gen;
  double rho = 0.5;
  double delta = 6.0;
  int samples = 2000;
  bool non_private = false;
  std::uint64_t seed = 1;
  std::string out = "diagnostic.csv";
};

int run_diagnostic(const DiagnosticArgs& a) {
  if (!(a.rho > 0.0)) throw UsageError{"--rho must be > 0"};
  if (!(a.delta > 0.0)) throw UsageError{"--delta must be > 0"};
  if (a.samples < 100) throw UsageError{"--samples must be >= 100"};

  const GeneratorSpec spec = make_spec(a.gen, false);
  std::printf("run: diagnostic mode=%s seed=%llu samples=%d\n",
              a.non_private ? "non-private" : "private",
              static_cast<unsigned long long>(a.seed), a.samples);
  std::printf("%s\n", gen_summary(spec).c_str());
  std::printf("params: rho=%s delta=%s\n", fmt6(a.rho).c_str(), fmt6(a.delta).c_str());

  RandomSource root(a.seed, 0);
  const ConvergenceReport rep = convergence_diagnostic(
      spec, PrivacyBudget(a.rho), ClipBound(a.delta), a.samples, root,
      !a.non_private);

  std::printf("ks-distance: %s\n", fmt6(rep.ks_distance).c_str());
  std::printf("sample-mean: %s\n", fmt6(rep.mean).c_str());
  std::printf("sample-variance: %s\n", fmt6(rep.variance).c_str());
  std::printf("eta-sq: %s\n", fmt6(rep.eta_sq).c_str());

  std::FILE* f = std::fopen(a.out.c_str(), "wb");
  if (!f) throw IoError("cannot open " + a.out + " for writing");
  std::fprintf(f, "n,rho,delta,samples,ks_distance,mean,variance,eta_sq\n");
  std::fprintf(f, "%lld,%s,%s,%d,%s,%s,%s,%s\n", static_cast<long long>(rep.n),
               fmt6(rep.rho).c_str(), fmt6(rep.delta).c_str(), rep.samples,
               fmt6(rep.ks_distance).c_str(), fmt6(rep.mean).c_str(),
               fmt6(rep.variance).c_str(), fmt6(rep.eta_sq).c_str());
  std::fclose(f);
  std::printf("wrote: %s\n", a.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private hypothesis tests for simple linear regression"};
  app.name("dplr");  // stable usage line regardless of the invocation path
  app.require_subcommand(1);

  TestArgs ta;
  CLI::App* test = app.add_subcommand(
      "test", "Run one hypothesis test on a CSV file or generated data");
  test->add_option("tester", ta.tester,
                   "Which test to run: linear-f | mixture-f | bernoulli | kw | ci")
      ->required()
      ->check(CLI::IsMember({"linear-f", "mixture-f", "bernoulli", "kw", "ci"}));
  CLI::Option* in_opt =
      test->add_option("--input", ta.input, "CSV file to test (default: generator)");
  CLI::Option* x_opt = test->add_option("--x", ta.x_col, "Column with x values");
  CLI::Option* y_opt = test->add_option("--y", ta.y_col, "Column with y values");
  CLI::Option* g_opt =
      test->add_option("--group", ta.group_col, "Column with the two group labels");
  in_opt->needs(x_opt)->needs(y_opt);
  x_opt->needs(in_opt);
  y_opt->needs(in_opt);
  g_opt->needs(in_opt);
  std::vector<CLI::Option*> test_gen_opts;
  add_gen_flags(test, ta.gen, test_gen_opts);
  for (CLI::Option* o : test_gen_opts) in_opt->excludes(o);
  test->add_option("--rho", ta.rho, "Privacy budget rho (zCDP)")
      ->capture_default_str();
  test->add_option("--delta", ta.delta, "Clipping bound Delta")
      ->capture_default_str();
  test->add_option("--alpha", ta.alpha, "Significance level")->capture_default_str();
  test->add_option("--k", ta.K, "Monte Carlo calibration simulations")
      ->capture_default_str();
  test->add_option("--target-slope", ta.target_slope,
                   "Hypothesized slope for the ci tester")
      ->capture_default_str();
  test->add_option("--mixture-null-slope", ta.null_slope,
                   "Null-simulation slope for mixture-f: pooled | group1")
      ->check(CLI::IsMember({"pooled", "group1"}))
      ->capture_default_str();
  test->add_option("--kw-lo", ta.kw_lo, "Null-sampler interval low end (kw)")
      ->capture_default_str();
  test->add_option("--kw-hi", ta.kw_hi, "Null-sampler interval high end (kw)")
      ->capture_default_str();
  test->add_flag("--redraw-bottom-sims", ta.redraw_bottom,
                 "Redraw calibration simulations that return no statistic instead "
                 "of scoring them -infinity");
  test->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
  test->add_option("--out", ta.out, "Write a one-row machine-readable record here");

  ExperimentArgs ea;
  CLI::App* exp = app.add_subcommand(
      "experiment", "Estimate rejection rates over a privacy-budget grid");
  exp->add_option("mode", ea.mode,
                  "significance (run each tester against its null) | power")
      ->required()
      ->check(CLI::IsMember({"significance", "power"}));
  std::vector<CLI::Option*> exp_gen_opts;
  add_gen_flags(exp, ea.gen, exp_gen_opts);
  exp->add_option("--testers", ea.testers,
                  "Comma-separated: linear-f, mixture-f, bernoulli, kw, ci, "
                  "nonprivate-f, nonprivate-mixture-f")
      ->capture_default_str();
  exp->add_option("--rho-grid", ea.rho_grid,
                  "Comma-separated privacy budgets (one results row per tester "
                  "and budget; non-private testers emit a single row)")
      ->capture_default_str();
  exp->add_option("--trials", ea.trials, "Trials per cell")->capture_default_str();
  exp->add_option("--delta", ea.delta, "Clipping bound Delta")
      ->capture_default_str();
  exp->add_option("--alpha", ea.alpha, "Significance level")->capture_default_str();
  exp->add_option("--k", ea.K, "Monte Carlo calibration simulations")
      ->capture_default_str();
  exp->add_option("--target-slope", ea.target_slope,
                  "Hypothesized slope for the ci tester (power mode)")
      ->capture_default_str();
  exp->add_option("--mixture-null-slope", ea.null_slope,
                  "Null-simulation slope for mixture-f: pooled | group1")
      ->check(CLI::IsMember({"pooled", "group1"}))
      ->capture_default_str();
  exp->add_option("--kw-lo", ea.kw_lo, "Null-sampler interval low end (kw)")
      ->capture_default_str();
  exp->add_option("--kw-hi", ea.kw_hi, "Null-sampler interval high end (kw)")
      ->capture_default_str();
  exp->add_flag("--redraw-bottom-sims", ea.redraw_bottom,
                "Redraw calibration simulations that return no statistic instead "
                "of scoring them -infinity");
  exp->add_option("--seed", ea.seed, "Random seed")->capture_default_str();
  exp->add_option("--jobs", ea.jobs, "Worker threads (results identical for any value)")
      ->capture_default_str();
  exp->add_option("--out", ea.out, "Results CSV path")->capture_default_str();

  DiagnosticArgs da;
  CLI::App* diag = app.add_subcommand(
      "diagnostic",
      "Sample the test statistic repeatedly and measure its Kolmogorov-Smirnov "
      "distance to the large-n chi-square reference");
  da.gen.n = 100000;  // diagnostic targets the large-n regime by default
  std::vector<CLI::Option*> diag_gen_opts;
  add_gen_flags(diag, da.gen, diag_gen_opts);
  diag->add_option("--rho", da.rho, "Privacy budget rho (zCDP)")
      ->capture_default_str();
  diag->add_option("--delta", da.delta, "Clipping bound Delta")
      ->capture_default_str();
  diag->add_option("--samples", da.samples, "Statistic draws (>= 100)")
      ->capture_default_str();
  diag->add_flag("--non-private", da.non_private,
                 "Sample the exact statistic instead of the private one");
  diag->add_option("--seed", da.seed, "Random seed")->capture_default_str();
  diag->add_option("--out", da.out, "Report CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ta.file_source = in_opt->count() > 0;
    ta.has_group = g_opt->count() > 0;
    ta.gen.slope2_given = false;
    ea.gen.slope2_given = false;
    for (CLI::Option* o : test_gen_opts) {
      if (o->get_name() == "--slope2" && o->count() > 0) ta.gen.slope2_given = true;
    }
    for (CLI::Option* o : exp_gen_opts) {
      if (o->get_name() == "--slope2" && o->count() > 0) ea.gen.slope2_given = true;
    }
    if (test->parsed()) return run_test(ta);
    if (exp->parsed()) return run_experiment(ea);
    if (diag->parsed()) return run_diagnostic(da);
    return 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.message.c_str());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

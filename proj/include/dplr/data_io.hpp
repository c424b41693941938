// Synthetic dataset generation and CSV input/output.
//
// Generators draw x i.i.d. from a configurable distribution and y from the
// linear model y = intercept + slope*x + N(0, sigma_e^2) (two zero-intercept
// slopes for the grouped mixture design). CSV is the single external format:
// UTF-8, comma-separated, header row, '.' decimals, LF line endings on output
// (CRLF tolerated on input).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dplr/linmodel.hpp"
#include "dplr/random.hpp"

namespace dplr {

struct RejectionEstimate;  // defined in harness.hpp; rows of the results CSV

using AnyDataset = std::variant<Dataset, GroupedDataset>;

// Distribution of the independent variable. Parameter meaning by kind:
//   Normal(a = mean, b = sd >= 0)      Uniform(a = lo, b = hi, lo < hi)
//   Exponential(a = scale > 0)         LogNormal(a = mu, b = sigma >= 0)
struct XDist {
  enum class Kind { Normal, Uniform, Exponential, LogNormal };

  Kind kind = Kind::Normal;
  double a = 0.0;
  double b = 1.0;

  static XDist normal(double mean, double sd) { return {Kind::Normal, mean, sd}; }
  static XDist uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static XDist exponential(double scale) { return {Kind::Exponential, scale, 0.0}; }
  static XDist lognormal(double mu, double sigma) {
    return {Kind::LogNormal, mu, sigma};
  }

  void validate() const;    // throws InvalidSpec
  double mean() const;      // analytic mean
  double variance() const;  // analytic variance
  double sample(RandomSource& rng) const;
};

// Second slope and group-1 fraction for the two-group mixture design.
struct MixturePart {
  double slope2 = 0.0;
  double frac1 = 0.5;  // group 1 gets floor(frac1 * n) rows
};

// Full generator configuration. Linear model unless `mixture` is set; the
// mixture design ignores `intercept` (both groups are zero-intercept by
// construction).
struct GeneratorSpec {
  XDist x_dist = XDist::normal(0.5, 1.0);
  double slope = 0.0;      // beta_1
  double intercept = 0.0;  // beta_2
  double sigma_e = 1.0;    // error sd, >= 0
  std::int64_t n = 100;    // >= 4
  std::optional<MixturePart> mixture;

  bool is_mixture() const { return mixture.has_value(); }
  std::int64_t group1_size() const;  // floor(frac1 * n)
  void validate() const;             // throws InvalidSpec
};

// Row draw order is x then error, row by row (groups in order for the
// mixture), making generation bit-reproducible for a fixed RandomSource.
Dataset generate_linear(const GeneratorSpec& spec, RandomSource& rng);
GroupedDataset generate_mixture(const GeneratorSpec& spec, RandomSource& rng);
AnyDataset generate(const GeneratorSpec& spec, RandomSource& rng);

// Reads the named columns from a CSV file. Row order is preserved; with a
// group column, rows are stably partitioned into group 1 (rows carrying the
// first label seen) followed by group 2. Errors: IoError (unreadable file),
// MissingColumn, ParseError (reports the 1-based file line and column name),
// MoreThanTwoGroups.
AnyDataset read_csv(const std::string& path, const std::string& x_col,
                    const std::string& y_col,
                    const std::optional<std::string>& group_col = std::nullopt);

// Writes experiment rows with header
//   tester,n,rho,delta,alpha,K,trials,reject_rate,stderr
// in input order, reals at 6 significant digits, LF endings. A non-private
// tester's rho is +infinity and prints as "inf". Throws IoError.
void write_results_csv(const std::vector<RejectionEstimate>& rows,
                       const std::string& path);

}  // namespace dplr

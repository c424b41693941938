// zCDP building blocks: clipping, the Gaussian mechanism, and budget splitting.
//
// A statistic with sensitivity s released as value + N(0, s^2/(2*rho)) satisfies
// rho-zCDP; k releases at rho/k each compose to rho total. Sensitivities are
// always supplied by the caller: each tester's clipping determines them, and
// keeping them explicit makes the privacy accounting auditable per call site.
#pragma once

#include <cstdint>
#include <vector>

#include "dplr/errors.hpp"
#include "dplr/random.hpp"

namespace dplr {

// zCDP privacy-loss budget. Stored as the exact rational numerator/denominator
// so that split parts sum back to the original budget exactly (a part of rho
// split k ways is the rational rho/k, not a rounded double). The double value
// is materialized only where a noise scale is computed.
class PrivacyBudget {
 public:
  // rho must be > 0.
  explicit PrivacyBudget(double rho) : numer_(rho), denom_(1) {
    if (!(rho > 0.0)) throw InvalidSpec("privacy budget rho must be positive");
  }

  double rho() const { return numer_ / static_cast<double>(denom_); }

  // Exact rational identity; used to verify composition accounting.
  friend bool operator==(const PrivacyBudget& a, const PrivacyBudget& b) {
    // a.numer/a.denom == b.numer/b.denom, cross-multiplied in exact doubles
    // (numerators are user inputs; denominators are small integer products).
    return a.numer_ * static_cast<double>(b.denom_) ==
           b.numer_ * static_cast<double>(a.denom_);
  }

  // Sum of parts as an exact rational (requires equal denominators, which
  // split_budget guarantees).
  static PrivacyBudget exact_sum(const std::vector<PrivacyBudget>& parts);

  friend std::vector<PrivacyBudget> split_budget(const PrivacyBudget& budget,
                                                 std::uint32_t k);

 private:
  PrivacyBudget(double numer, std::uint64_t denom) : numer_(numer), denom_(denom) {}
  double numer_;
  std::uint64_t denom_;
};

// Symmetric clip half-width Delta; values are clipped to [-Delta, Delta] and
// derived quantities to the induced ranges.
class ClipBound {
 public:
  explicit ClipBound(double delta) : delta_(delta) {
    if (!(delta > 0.0)) throw InvalidSpec("clip bound delta must be positive");
  }
  double delta() const { return delta_; }

 private:
  double delta_;
};

// min(hi, max(lo, v)). Throws InvalidBounds if lo > hi.
double clip(double v, double lo, double hi);

// value + N(0, sensitivity^2 / (2*rho)). Deterministic given the RandomSource.
double gaussian_mech(double value, double sensitivity, const PrivacyBudget& budget,
                     RandomSource& rng);

// k equal parts of rho/k each; the parts sum to the input budget exactly
// (PrivacyBudget::exact_sum(parts) == budget).
std::vector<PrivacyBudget> split_budget(const PrivacyBudget& budget, std::uint32_t k);

}  // namespace dplr

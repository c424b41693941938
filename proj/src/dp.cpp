#include "dplr/dp.hpp"

#include <cmath>

namespace dplr {

PrivacyBudget PrivacyBudget::exact_sum(const std::vector<PrivacyBudget>& parts) {
  if (parts.empty()) throw InvalidSpec("cannot sum an empty budget list");
  // k identical parts numer/denom sum to the rational (k*numer)/denom, which is
  // numer/(denom/k) whenever k divides denom -- always true for split_budget
  // output. No floating-point addition, so the identity is exact.
  const double numer = parts.front().numer_;
  const std::uint64_t denom = parts.front().denom_;
  const std::uint64_t k = parts.size();
  for (const auto& p : parts)
    if (p.numer_ != numer || p.denom_ != denom)
      throw InvalidSpec("exact_sum requires identical parts");
  if (denom % k != 0)
    throw InvalidSpec("exact_sum: part denominator not divisible by count");
  return PrivacyBudget(numer, denom / k);
}

double clip(double v, double lo, double hi) {
  if (lo > hi) throw InvalidBounds("clip bounds inverted: lo > hi");
  return std::min(hi, std::max(lo, v));
}

double gaussian_mech(double value, double sensitivity, const PrivacyBudget& budget,
                     RandomSource& rng) {
  if (!(sensitivity > 0.0)) throw InvalidSpec("sensitivity must be positive");
  const double sd = sensitivity / std::sqrt(2.0 * budget.rho());
  return value + sd * rng.normal();
}

std::vector<PrivacyBudget> split_budget(const PrivacyBudget& budget, std::uint32_t k) {
  if (k < 1) throw InvalidSpec("split_budget requires k >= 1");
  std::vector<PrivacyBudget> parts;
  parts.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i)
    parts.emplace_back(PrivacyBudget(budget.numer_, budget.denom_ * k));
  return parts;
}

}  // namespace dplr

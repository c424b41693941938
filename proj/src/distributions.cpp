#include "dplr/distributions.hpp"

#include <cmath>
#include <limits>

#include "dplr/errors.hpp"

namespace dplr {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 1000;
constexpr double kTiny = 1e-300;  // Lentz guard against zero denominators

// Series expansion of P(a, x), effective for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), effective for x >= a + 1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

// Generic Poisson mixture sum_j w_j(lambda/2) * central_cdf(j), evaluated
// outward from the modal j so weights never underflow relative to the total.
template <class CentralTerm>
double poisson_mixture(double lambda, CentralTerm term) {
  const double half = 0.5 * lambda;
  const long j0 = static_cast<long>(half);
  const auto log_weight = [half](long j) {
    return -half + j * std::log(half) - std::lgamma(static_cast<double>(j) + 1.0);
  };
  double sum = std::exp(log_weight(j0)) * term(j0);
  double weight_mass = std::exp(log_weight(j0));
  // Downward from the mode.
  double w = std::exp(log_weight(j0));
  for (long j = j0 - 1; j >= 0; --j) {
    w *= (j + 1) / half;  // w_j = w_{j+1} * (j+1)/half
    weight_mass += w;
    sum += w * term(j);
    if (w < kEps) break;
  }
  // Upward from the mode.
  w = std::exp(log_weight(j0));
  for (long j = j0 + 1; j < j0 + 100000; ++j) {
    w *= half / j;
    weight_mass += w;
    sum += w * term(j);
    if (w < kEps && weight_mass > 1.0 - 1e-13) break;
  }
  return sum;
}

// Bisection inversion of a monotone CDF on (0, inf).
template <class Cdf>
double invert_cdf(double p, Cdf cdf) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidSpec("quantile probability must be in (0,1)");
  double lo = 0.0;
  double hi = 1.0;
  while (cdf(hi) < p) {
    hi *= 2.0;
    if (hi > 1e300) throw InvalidSpec("quantile bracketing failed");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw InvalidSpec("reg_lower_gamma domain error");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidSpec("reg_inc_beta domain error");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidSpec("quantile probability must be in (0,1)");
  // Acklam's rational approximation, then one Halley refinement step against
  // normal_cdf, which brings the result to full double precision.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double chi2_cdf(double x, double k) {
  if (!(k > 0.0)) throw InvalidSpec("chi2 degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  return reg_lower_gamma(0.5 * k, 0.5 * x);
}

double chi2_quantile(double p, double k) {
  return invert_cdf(p, [k](double x) { return chi2_cdf(x, k); });
}

double noncentral_chi2_cdf(double x, double k, double lambda) {
  if (lambda < 0.0) throw InvalidSpec("noncentrality must be nonnegative");
  if (x <= 0.0) return 0.0;
  if (lambda == 0.0) return chi2_cdf(x, k);
  return poisson_mixture(
      lambda, [&](long j) { return chi2_cdf(x, k + 2.0 * static_cast<double>(j)); });
}

double f_cdf(double x, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw InvalidSpec("F degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_quantile(double p, double d1, double d2) {
  return invert_cdf(p, [d1, d2](double x) { return f_cdf(x, d1, d2); });
}

double noncentral_f_cdf(double x, double d1, double d2, double lambda) {
  if (lambda < 0.0) throw InvalidSpec("noncentrality must be nonnegative");
  if (x <= 0.0) return 0.0;
  if (lambda == 0.0) return f_cdf(x, d1, d2);
  const double y = d1 * x / (d1 * x + d2);
  return poisson_mixture(lambda, [&](long j) {
    return reg_inc_beta(0.5 * d1 + static_cast<double>(j), 0.5 * d2, y);
  });
}

}  // namespace dplr

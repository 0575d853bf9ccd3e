// Test-only reference implementations, independent of the library's
// evaluation paths: exact binomial tail sums in log space, a bisection
// Clopper-Pearson bound on top of them, and a Taylor-series normal CDF.
#pragma once

#include <cmath>
#include <stdexcept>

namespace isscert::testing {

// Pr[Bin(k, p) >= k_a], summed in log space. Exact up to double rounding
// for k up to a few thousand.
inline double binomial_tail(long k, long k_a, double p) {
  if (k_a <= 0) return 1.0;
  if (k_a > k) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double sum = 0.0;
  for (long i = k_a; i <= k; ++i) {
    const double log_term = std::lgamma(k + 1.0) - std::lgamma(i + 1.0) -
                            std::lgamma(k - i + 1.0) + i * std::log(p) +
                            (k - i) * std::log1p(-p);
    sum += std::exp(log_term);
  }
  return sum;
}

// The p solving Pr[Bin(k, p) >= k_a] = alpha, by bisection; this is the
// exact one-sided Clopper-Pearson lower bound for integer counts.
inline double cp_lower_oracle(double alpha, long k_a, long k) {
  if (k_a == 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_tail(k, k_a, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Phi(x) via the alternating Taylor series of erf; accurate to ~1e-14 for
// |x| <= 4, which covers the frozen test values.
inline double normal_cdf_oracle(double x) {
  const double z = x / std::sqrt(2.0);
  if (std::fabs(z) > 4.0) throw std::domain_error("normal_cdf_oracle: |x| too large");
  double term = z;
  double sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= -z * z / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-18) break;
  }
  const double erf = 2.0 / std::sqrt(M_PI) * sum;
  return 0.5 * (1.0 + erf);
}

}  // namespace isscert::testing

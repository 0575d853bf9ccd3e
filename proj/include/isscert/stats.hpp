#pragma once

#include <utility>

namespace isscert {

// Per-stage failure probability; the confidence level is 1 - alpha.
struct ConfidenceParams {
  double alpha;  // in (0, 1)
};

// Outcome of sampling a base classifier under noise.
struct SampleCounts {
  long total = 0;
  long top_count = 0;
  int top_label = -1;
};

// Standard normal CDF. Absolute error <= 1e-12, monotone, saturates
// smoothly at extreme x.
double std_normal_cdf(double x);

// Inverse of std_normal_cdf. Requires 0 < p < 1; |Phi(result) - p| <= 1e-9.
double std_normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b). Requires a > 0, b > 0,
// 0 <= x <= 1.
double reg_inc_beta(double a, double b, double x);

// Smallest x with I_x(a, b) = q, solved by bracketed Newton iteration with
// bisection fallback; CDF residual tolerance 1e-12.
double beta_quantile(double q, double a, double b);

// One-sided Clopper-Pearson lower bound: the alpha-quantile of
// Beta(k_a, k - k_a + 1). Fractional k_a is allowed (k_a = p * k arises in
// the decline definitions). k_a = 0 gives exactly 0.
double cp_lower(double alpha, double k_a, double k);

// Two-sided Clopper-Pearson interval at level 1 - alpha:
//   p_low = B(alpha/2; k_a, k - k_a + 1),  p_up = B(1 - alpha/2; k_a + 1, k - k_a)
// with the degenerate conventions k_a = 0 -> p_low = 0 and k_a = k -> p_up = 1.
std::pair<double, double> cp_two_sided(double alpha, long k_a, long k);

}  // namespace isscert

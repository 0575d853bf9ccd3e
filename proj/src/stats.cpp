#include "isscert/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace isscert {

namespace {

constexpr double kCdfResidualTol = 1e-12;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log density of Beta(a, b) at x, up to exactness of lgamma.
double log_beta_pdf(double a, double b, double x) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

}  // namespace

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must be in (0,1)");
  }
  // Acklam's rational minimax approximation, then one Halley step.
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
  // Halley refinement against the CDF.
  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("reg_inc_beta: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("reg_inc_beta: x must be in [0,1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double beta_quantile(double q, double a, double b) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("beta_quantile: q must be in (0,1)");
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("beta_quantile: shape parameters must be positive");
  }
  // Closed forms; also the stable path for the extreme shapes Beta(k,1).
  if (b == 1.0) return std::pow(q, 1.0 / a);
  if (a == 1.0) return -std::expm1(std::log1p(-q) / b);

  double lo = 0.0, hi = 1.0;
  double x = a / (a + b);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = reg_inc_beta(a, b, x) - q;
    if (std::fabs(f) <= kCdfResidualTol) return x;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double lpdf = log_beta_pdf(a, b, x);
    double next;
    if (std::isfinite(lpdf)) {
      next = x - f * std::exp(-lpdf);
    } else {
      next = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);  // bisection fallback
    }
    if (next == x || hi - lo <= x * 1e-17) return x;
    x = next;
  }
  return x;
}

double cp_lower(double alpha, double k_a, double k) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("cp_lower: alpha must be in (0,1)");
  }
  if (!(k > 0.0) || k_a < 0.0 || k_a > k) {
    throw std::domain_error("cp_lower: need 0 <= k_a <= k, k > 0");
  }
  if (k_a == 0.0) return 0.0;  // degenerate shape a = 0
  if (k_a == k) return std::pow(alpha, 1.0 / k);
  return beta_quantile(alpha, k_a, k - k_a + 1.0);
}

std::pair<double, double> cp_two_sided(double alpha, long k_a, long k) {
  if (k <= 0 || k_a < 0 || k_a > k) {
    throw std::domain_error("cp_two_sided: need 0 <= k_a <= k, k > 0");
  }
  const double ka = static_cast<double>(k_a);
  const double kd = static_cast<double>(k);
  const double p_low = cp_lower(alpha / 2.0, ka, kd);
  double p_up;
  if (k_a == k) {
    p_up = 1.0;  // degenerate shape b = 0
  } else {
    p_up = beta_quantile(1.0 - alpha / 2.0, ka + 1.0, kd - ka);
  }
  return {p_low, p_up};
}

}  // namespace isscert

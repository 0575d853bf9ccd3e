#include "isscert/decline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "isscert/stats.hpp"

namespace isscert {

double radius_hat(double k, double p, double sigma, double alpha) {
  if (!(p > 0.0 && p <= 1.0) || !(k >= 1.0)) {
    throw std::domain_error("radius_hat: need 0 < p <= 1 and k >= 1");
  }
  if (!(sigma > 0.0)) {
    throw std::domain_error("radius_hat: sigma must be positive");
  }
  const double bound = cp_lower(alpha, p * k, k);
  if (bound <= 0.0) return -std::numeric_limits<double>::infinity();
  return sigma * std_normal_quantile(bound);
}

std::optional<double> absolute_decline(double k, double k_bar, double p,
                                       double sigma, double alpha) {
  if (!(k >= 1.0 && k <= k_bar)) {
    throw std::domain_error("absolute_decline: need 1 <= k <= k_bar");
  }
  const double desired = radius_hat(k_bar, p, sigma, alpha);
  const double estimated = radius_hat(k, p, sigma, alpha);
  if (std::isinf(desired) || std::isinf(estimated)) return std::nullopt;
  return desired - estimated;
}

std::optional<double> relative_decline(double k, double k_bar, double p,
                                       double alpha) {
  if (!(k >= 1.0 && k <= k_bar)) {
    throw std::domain_error("relative_decline: need 1 <= k <= k_bar");
  }
  const double desired = radius_hat(k_bar, p, 1.0, alpha);
  const double estimated = radius_hat(k, p, 1.0, alpha);
  if (!(desired > 0.0) || std::isinf(estimated)) return std::nullopt;
  return 1.0 - estimated / desired;
}

}  // namespace isscert

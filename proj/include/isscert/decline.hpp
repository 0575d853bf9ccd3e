#pragma once

#include <optional>

namespace isscert {

struct SmoothingParams {
  double sigma;  // Gaussian noise standard deviation, > 0
};

enum class DeclineKind { Absolute, Relative };

// Upper bound on the certified-radius decline: U_AD in radius units, or
// U_RD as a dimensionless fraction in (0, 1).
struct DeclineBudget {
  DeclineKind kind = DeclineKind::Absolute;
  double bound = 0.0;
};

// Radius estimator sigma * Phi^-1(B(alpha; p*k, k - p*k + 1)). May be
// negative; returns -infinity when the Clopper-Pearson bound is 0 (the
// radius does not exist). k and p*k may be fractional.
double radius_hat(double k, double p, double sigma, double alpha);

// AD(k; k_bar, p) = radius_hat(k_bar, ...) - radius_hat(k, ...).
// nullopt when either radius is the -infinity sentinel.
std::optional<double> absolute_decline(double k, double k_bar, double p,
                                       double sigma, double alpha);

// RD(k; k_bar, p) = 1 - radius_hat(k, ...) / radius_hat(k_bar, ...).
// sigma cancels. nullopt when the desired radius is <= 0 or undefined.
std::optional<double> relative_decline(double k, double k_bar, double p,
                                       double alpha);

}  // namespace isscert

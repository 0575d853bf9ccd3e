#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "isscert/decline.hpp"
#include "isscert/stats.hpp"

using namespace isscert;

TEST_CASE("radius_hat closed-form anchor at p = 1") {
  // cp_lower(alpha, k, k) = alpha^(1/k), so the radius is in closed form.
  const double expected =
      std_normal_quantile(std::pow(0.001, 1.0 / 100000.0));
  CHECK(std::fabs(radius_hat(100000.0, 1.0, 1.0, 0.001) - expected) < 1e-12);
  CHECK(radius_hat(100000.0, 1.0, 1.0, 0.001) == doctest::Approx(3.813).epsilon(0.01));
}

TEST_CASE("radius_hat is zero when the bound is one half") {
  // Pick k, p so that cp_lower is ~0.5 and verify near-zero radius; the
  // exact-zero case is the definitional identity Phi^-1(1/2) = 0.
  CHECK(std_normal_quantile(0.5) == 0.0);
  const double r = radius_hat(1000.0, 0.53, 1.0, 0.001);
  CHECK(std::fabs(r) < 0.1);
}

TEST_CASE("absolute_decline basics") {
  CHECK(*absolute_decline(5000.0, 5000.0, 0.9, 1.0, 0.001) == 0.0);
  // Frozen reference value at the (sigma=0.5, alpha=0.001) operating point.
  const double ad = *absolute_decline(50000.0, 100000.0, 0.99, 0.5, 0.001);
  CHECK(ad == doctest::Approx(0.0075).epsilon(0.15));
  CHECK(std::fabs(ad - 0.0075) < 0.001);
}

TEST_CASE("absolute_decline nonnegative and nonincreasing in k") {
  std::mt19937_64 rng(3);
  for (double p : {0.55, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999}) {
    const double k_bar = 100000.0;
    double prev = 1e300;
    for (double lk = std::log(10.0); lk <= std::log(k_bar); lk += 0.4) {
      const double k = std::floor(std::exp(lk));
      const auto ad = absolute_decline(k, k_bar, p, 1.0, 0.001);
      REQUIRE(ad.has_value());
      CHECK(*ad >= -1e-12);
      CHECK(*ad <= prev + 1e-9);
      prev = *ad;
    }
  }
}

TEST_CASE("absolute_decline sigma scaling") {
  const double base = *absolute_decline(20000.0, 100000.0, 0.95, 1.0, 0.001);
  // Power-of-two scaling is exact in floating point.
  CHECK(*absolute_decline(20000.0, 100000.0, 0.95, 2.0, 0.001) == 2.0 * base);
  const double scaled = *absolute_decline(20000.0, 100000.0, 0.95, 3.0, 0.001);
  CHECK(scaled == doctest::Approx(3.0 * base).epsilon(1e-13));
}

TEST_CASE("relative_decline identity and properties") {
  CHECK(*relative_decline(5000.0, 5000.0, 0.9, 0.001) == 0.0);

  const double ad = *absolute_decline(50000.0, 100000.0, 0.99, 1.0, 0.001);
  const double desired = radius_hat(100000.0, 0.99, 1.0, 0.001);
  const double rd = *relative_decline(50000.0, 100000.0, 0.99, 0.001);
  CHECK(std::fabs(rd - ad / desired) < 1e-9);

  const double rd2 = *relative_decline(1000.0, 100000.0, 0.999, 0.001);
  CHECK(rd2 > 0.0);
  CHECK(rd2 < 1.0);
}

TEST_CASE("relative_decline nonincreasing in k and sigma-free") {
  for (double p : {0.6, 0.9, 0.999}) {
    double prev = 1e300;
    for (double lk = std::log(100.0); lk <= std::log(100000.0); lk += 0.5) {
      const double k = std::floor(std::exp(lk));
      const auto rd = relative_decline(k, 100000.0, p, 0.001);
      REQUIRE(rd.has_value());
      CHECK(*rd >= -1e-12);
      CHECK(*rd <= prev + 1e-9);
      prev = *rd;
    }
  }
}

TEST_CASE("relative_decline undefined when the desired radius is nonpositive") {
  // At p = 0.55 and k_bar = 100 the lower bound stays below one half.
  CHECK(!relative_decline(50.0, 100.0, 0.55, 0.001).has_value());
}

TEST_CASE("decline precondition errors") {
  CHECK_THROWS_AS(absolute_decline(200.0, 100.0, 0.9, 1.0, 0.001),
                  std::domain_error);
  CHECK_THROWS_AS(radius_hat(100.0, 0.0, 1.0, 0.001), std::domain_error);
  CHECK_THROWS_AS(radius_hat(100.0, 0.9, -1.0, 0.001), std::domain_error);
}

#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "isscert/decline.hpp"
#include "isscert/mapping.hpp"

using namespace isscert;

namespace {

const DeclineBudget kAd005{DeclineKind::Absolute, 0.05};
const DeclineBudget kRd005{DeclineKind::Relative, 0.05};

}  // namespace

TEST_CASE("psi_exact zero region") {
  CHECK(psi_exact(0.4, kAd005, 100000, 1.0, 0.001) == 0);
  CHECK(psi_exact(0.5, kAd005, 100000, 1.0, 0.001) == 0);
  CHECK(psi_exact(0.0, kAd005, 100000, 1.0, 0.001) == 0);
}

TEST_CASE("psi_exact reproduces frozen sample-size anchors") {
  // (sigma = 0.5, alpha = 0.001) is the operating point behind the frozen
  // 35,000 / 65,000 anchors at U_AD = 0.0042.
  const DeclineBudget tight{DeclineKind::Absolute, 0.0042};
  const long k1 = psi_exact(0.51, tight, 100000, 0.5, 0.001);
  const long k2 = psi_exact(0.99, tight, 100000, 0.5, 0.001);
  CHECK(k1 >= 30000);
  CHECK(k1 <= 40000);
  CHECK(k2 >= 60000);
  CHECK(k2 <= 70000);
}

TEST_CASE("psi_exact never exceeds k_bar and is minimal") {
  for (double p : {0.55, 0.7, 0.9, 0.99, 1.0}) {
    const long k = psi_exact(p, kAd005, 20000, 0.5, 0.001);
    CHECK(k <= 20000);
    if (k >= 2) {
      const auto at = absolute_decline(static_cast<double>(k), 20000.0, p, 0.5, 0.001);
      const auto below =
          absolute_decline(static_cast<double>(k - 1), 20000.0, p, 0.5, 0.001);
      REQUIRE(at.has_value());
      CHECK(*at <= 0.05 + 1e-12);
      if (below) CHECK(*below > 0.05 - 1e-12);
    }
  }
}

TEST_CASE("build_mapping trivial table when the budget dwarfs the radius") {
  const DeclineBudget huge{DeclineKind::Absolute, 10.0};
  const MappingTable t = build_mapping(0.5, huge, 1000, 1.0, 0.001, 1);
  REQUIRE(t.sizes.size() == 3);
  CHECK(t.sizes[0] == 0);
  CHECK(t.sizes[1] == 0);
  CHECK(t.sizes[2] == 0);
}

TEST_CASE("build_mapping zero region and AD monotonicity") {
  const MappingTable t = build_mapping(0.01, kAd005, 20000, 0.5, 0.001, 0);
  REQUIRE(t.sizes.size() == 101);
  for (long n = 0; n <= 50; ++n) CHECK(t.sizes[n] == 0);
  long prev = 0;
  bool in_positive = false;
  for (long n = 0; n <= 100; ++n) {
    if (t.sizes[n] > 0) {
      if (in_positive) CHECK(t.sizes[n] >= prev);
      in_positive = true;
      prev = t.sizes[n];
    }
  }
  for (long s : t.sizes) CHECK(s <= t.k_bar);
}

TEST_CASE("build_mapping rejects non-integral 1/delta") {
  CHECK_THROWS_AS(build_mapping(0.3, kAd005, 1000, 1.0, 0.001, 1),
                  std::invalid_argument);
}

TEST_CASE("tightness at grid points") {
  for (const DeclineBudget& budget : {kAd005, kRd005}) {
    const MappingTable t = build_mapping(0.02, budget, 20000, 0.5, 0.001, 0);
    for (long n = 0; n < t.grid_points(); ++n) {
      if (t.sizes[n] < 2) continue;
      const double p = (n == t.grid_points() - 1) ? 1.0 : n * t.delta;
      const double k = static_cast<double>(t.sizes[n]);
      std::optional<double> at, below;
      if (budget.kind == DeclineKind::Absolute) {
        at = absolute_decline(k, 20000.0, p, 0.5, 0.001);
        below = absolute_decline(k - 1, 20000.0, p, 0.5, 0.001);
      } else {
        at = relative_decline(k, 20000.0, p, 0.001);
        below = relative_decline(k - 1, 20000.0, p, 0.001);
      }
      REQUIRE(at.has_value());
      CHECK(*at <= budget.bound + 1e-12);
      if (below) CHECK(*below > budget.bound - 1e-12);
    }
  }
}

TEST_CASE("lookup branches") {
  const MappingTable t = build_mapping(0.01, kAd005, 20000, 0.5, 0.001, 0);
  CHECK(lookup(t, 0.60) == t.sizes[60]);
  CHECK(lookup(t, 1.0) == t.sizes[100]);
  CHECK(lookup(t, 0.3) == 0);
  const long interior = lookup(t, 0.605);
  CHECK(interior == std::max(t.sizes[60], t.sizes[61]));
  CHECK_THROWS_AS(lookup(t, 1.5), std::domain_error);
  CHECK_THROWS_AS(lookup(t, -0.1), std::domain_error);
}

TEST_CASE("lookup dominates psi_exact") {
  const MappingTable t = build_mapping(0.01, kAd005, 10000, 0.5, 0.001, 0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5 + 1e-6, 1.0 - 1e-9);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng);
    CHECK(lookup(t, p) >= psi_exact(p, kAd005, 10000, 0.5, 0.001));
  }
}

TEST_CASE("budget and k_bar monotonicity") {
  const DeclineBudget loose{DeclineKind::Absolute, 0.10};
  const MappingTable t05 = build_mapping(0.01, kAd005, 100000, 0.5, 0.001, 0);
  const MappingTable t10 = build_mapping(0.01, loose, 100000, 0.5, 0.001, 0);
  for (long n = 0; n < t05.grid_points(); ++n) {
    CHECK(t10.sizes[n] <= t05.sizes[n]);
  }
  const MappingTable big = build_mapping(0.01, kAd005, 500000, 0.5, 0.001, 0);
  for (long n = 0; n < t05.grid_points(); ++n) {
    CHECK(big.sizes[n] >= t05.sizes[n]);
  }
}

TEST_CASE("relative tables are valley-shaped on the positive region") {
  const MappingTable t = build_mapping(0.01, kRd005, 100000, 0.5, 0.001, 0);
  std::vector<long> positive;
  for (long s : t.sizes) {
    if (s > 0 && (positive.empty() || positive.back() != s)) positive.push_back(s);
  }
  REQUIRE(positive.size() >= 3);
  int sign_changes = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < positive.size(); ++i) {
    const int sign = positive[i] > positive[i - 1] ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++sign_changes;
    last_sign = sign;
  }
  CHECK(sign_changes <= 1);
}

TEST_CASE("save/load round trip") {
  const MappingTable t = build_mapping(0.05, kAd005, 5000, 0.5, 0.001, 1);
  const std::string text = save_mapping(t);
  const MappingTable back = load_mapping(text);
  CHECK(back.delta == t.delta);
  CHECK(back.k_bar == t.k_bar);
  CHECK(back.alpha == t.alpha);
  CHECK(back.sigma == t.sigma);
  CHECK(back.budget.kind == t.budget.kind);
  CHECK(back.budget.bound == t.budget.bound);
  CHECK(back.sizes == t.sizes);
  CHECK(save_mapping(back) == text);
}

TEST_CASE("load_mapping rejects malformed and mismatched input") {
  const MappingTable t = build_mapping(0.05, kAd005, 5000, 0.5, 0.001, 1);
  const std::string text = save_mapping(t);
  CHECK_THROWS_AS(load_mapping(text.substr(0, text.size() / 2)),
                  std::runtime_error);
  TableExpectations expect;
  expect.kind = DeclineKind::Relative;
  CHECK_THROWS_AS(load_mapping(text, expect), std::runtime_error);
  TableExpectations ok;
  ok.kind = DeclineKind::Absolute;
  ok.k_bar = 5000;
  CHECK_NOTHROW(load_mapping(text, ok));
}

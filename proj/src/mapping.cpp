#include "isscert/mapping.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "isscert/stats.hpp"

namespace isscert {

namespace {

bool delta_is_valid(double delta, long& inv_delta) {
  if (!(delta > 0.0 && delta < 1.0)) return false;
  const double inv = 1.0 / delta;
  inv_delta = std::lround(inv);
  return inv_delta >= 2 && std::fabs(inv - static_cast<double>(inv_delta)) < 1e-6;
}

}  // namespace

long psi_exact(double p, const DeclineBudget& budget, long k_bar, double sigma,
               double alpha) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("psi_exact: p must be in [0,1]");
  }
  if (k_bar < 1) {
    throw std::domain_error("psi_exact: k_bar must be positive");
  }
  if (p == 0.0) return 0;
  const double kb = static_cast<double>(k_bar);
  const double desired = radius_hat(kb, p, sigma, alpha);
  if (std::isinf(desired)) return 0;
  const double floor_radius = budget.kind == DeclineKind::Absolute
                                  ? desired - budget.bound
                                  : (1.0 - budget.bound) * desired;
  if (floor_radius <= 0.0) return 0;

  // radius_hat is nondecreasing in k at fixed p; k = k_bar always satisfies
  // the constraint (zero decline).
  long lo = 1, hi = k_bar;
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (radius_hat(static_cast<double>(mid), p, sigma, alpha) >= floor_radius) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  // Guard against local floating-point non-monotonicity near the boundary.
  while (lo > 1 &&
         radius_hat(static_cast<double>(lo - 1), p, sigma, alpha) >= floor_radius) {
    --lo;
  }
  return lo;
}

MappingTable build_mapping(double delta, const DeclineBudget& budget,
                           long k_bar, double sigma, double alpha,
                           unsigned threads) {
  long inv_delta = 0;
  if (!delta_is_valid(delta, inv_delta)) {
    throw std::invalid_argument("build_mapping: 1/delta must be an integer >= 2");
  }
  MappingTable table;
  table.delta = delta;
  table.k_bar = k_bar;
  table.alpha = alpha;
  table.sigma = sigma;
  table.budget = budget;
  table.sizes.assign(inv_delta + 1, 0);

  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;

  std::atomic<long> next{0};
  auto worker = [&]() {
    for (long n = next.fetch_add(1); n <= inv_delta; n = next.fetch_add(1)) {
      const double p = (n == inv_delta) ? 1.0 : n * delta;
      table.sizes[n] = psi_exact(p, budget, k_bar, sigma, alpha);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return table;
}

long lookup(const MappingTable& table, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("lookup: p must be in [0,1]");
  }
  const long inv_delta = table.grid_points() - 1;
  const double t = p * static_cast<double>(inv_delta);
  const double nearest = std::round(t);
  if (std::fabs(t - nearest) < 1e-9) {
    return table.sizes[static_cast<long>(nearest)];
  }
  const long n1 = static_cast<long>(std::floor(t));
  const long n2 = n1 + 1;
  return std::max(table.sizes[n1], table.sizes[n2]);
}

const char* decline_kind_name(DeclineKind kind) {
  return kind == DeclineKind::Absolute ? "absolute" : "relative";
}

std::string save_mapping(const MappingTable& table) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = decline_kind_name(table.budget.kind);
  j["bound"] = table.budget.bound;
  j["k_bar"] = table.k_bar;
  j["alpha"] = table.alpha;
  j["sigma"] = table.sigma;
  j["delta"] = table.delta;
  j["sizes"] = table.sizes;
  return j.dump(1) + "\n";
}

MappingTable load_mapping(const std::string& text,
                          const TableExpectations& expect) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("mapping table parse error: ") + e.what());
  }
  MappingTable table;
  try {
    if (j.at("format_version").get<int>() != 1) {
      throw std::runtime_error("mapping table: unsupported format_version");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "absolute") {
      table.budget.kind = DeclineKind::Absolute;
    } else if (kind == "relative") {
      table.budget.kind = DeclineKind::Relative;
    } else {
      throw std::runtime_error("mapping table: unknown kind '" + kind + "'");
    }
    table.budget.bound = j.at("bound").get<double>();
    table.k_bar = j.at("k_bar").get<long>();
    table.alpha = j.at("alpha").get<double>();
    table.sigma = j.at("sigma").get<double>();
    table.delta = j.at("delta").get<double>();
    table.sizes = j.at("sizes").get<std::vector<long>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("mapping table parse error: ") + e.what());
  }
  long inv_delta = 0;
  if (!delta_is_valid(table.delta, inv_delta) ||
      static_cast<long>(table.sizes.size()) != inv_delta + 1) {
    throw std::runtime_error("mapping table: sizes length inconsistent with delta");
  }
  if (expect.kind && *expect.kind != table.budget.kind) {
    throw std::runtime_error("mapping table: expected kind " +
                             std::string(decline_kind_name(*expect.kind)) +
                             ", file has " + decline_kind_name(table.budget.kind));
  }
  if (expect.k_bar && *expect.k_bar != table.k_bar) {
    throw std::runtime_error("mapping table: k_bar mismatch");
  }
  if (expect.alpha && *expect.alpha != table.alpha) {
    throw std::runtime_error("mapping table: alpha mismatch");
  }
  if (expect.sigma && *expect.sigma != table.sigma) {
    throw std::runtime_error("mapping table: sigma mismatch");
  }
  return table;
}

}  // namespace isscert

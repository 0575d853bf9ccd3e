#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isscert/decline.hpp"

namespace isscert {

// Precomputed piecewise-constant sample-size mapping. sizes[N] is the
// minimum sample size at grid point p = N * delta, 0 meaning "no radius
// can be certified within the budget" (the r~ <= 0 branch).
struct MappingTable {
  double delta = 0.0;  // grid step; 1/delta integral
  long k_bar = 0;      // desired sample size
  double alpha = 0.0;
  double sigma = 0.0;  // recorded even for Relative budgets (provenance)
  DeclineBudget budget;
  std::vector<long> sizes;  // length 1/delta + 1

  long grid_points() const { return static_cast<long>(sizes.size()); }
};

// Exact per-point solver: smallest k in [1, k_bar] whose radius reaches the
// budgeted floor r~, or 0 when r~ <= 0 / the desired radius is undefined.
long psi_exact(double p, const DeclineBudget& budget, long k_bar, double sigma,
               double alpha);

// Evaluates psi_exact on the uniform grid p = 0, delta, ..., 1.
// threads = 0 picks hardware concurrency; grid points are independent.
MappingTable build_mapping(double delta, const DeclineBudget& budget,
                           long k_bar, double sigma, double alpha,
                           unsigned threads = 0);

// Piecewise-constant query: grid points return their entry, interior points
// the max of the two neighboring entries, so lookup(p) >= psi_exact(p).
long lookup(const MappingTable& table, double p);

struct TableExpectations {
  std::optional<DeclineKind> kind;
  std::optional<long> k_bar;
  std::optional<double> alpha;
  std::optional<double> sigma;
};

// Self-describing text serialization; save/load round-trips exactly.
std::string save_mapping(const MappingTable& table);
MappingTable load_mapping(const std::string& text,
                          const TableExpectations& expect = {});

const char* decline_kind_name(DeclineKind kind);

}  // namespace isscert

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isscert/certify.hpp"
#include "isscert/oracle.hpp"

namespace isscert {

struct ExperimentConfig {
  PopulationSpec population;
  double sigma = 0.5;
  double alpha = 0.001;
  std::vector<DeclineBudget> budgets = {{DeclineKind::Absolute, 0.05}};
  long k_bar = 100000;
  double k0_fraction = 0.01;  // k0 = k0_fraction * k_bar
  double delta = 0.001;
  std::vector<double> radii_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  std::vector<long> ias_ks;  // IAS comparison sample sizes (besides k_bar)
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";

  long k0() const;
  void validate() const;
};

struct InputRecord {
  int input_id = 0;
  std::string method;
  double p_a_truth = 0.0;
  long k_hat = 0;
  long samples_consumed = 0;
  double p_low = -1.0, p_up = -1.0;  // -1 when the method has no stage 1
  double p_lower_onesided = 0.0;
  double radius = 0.0;
  bool correct = false;
  bool abstained = false;
  bool diag_flag = false;
  double analytic_decline = 0.0;  // AD at the realized sample size, NaN if undefined
};

struct MethodSummary {
  std::string method;
  double avg_samples = 0.0;
  double acr = 0.0;
  double mad = 0.0;           // vs the k_bar baseline, clamped at 0
  double analytic_mad = 0.0;  // max analytic decline (diagnostic)
  double abstain_rate = 0.0;
  std::vector<double> ca;  // CA(r) on the radii grid
  double wall_seconds = 0.0;
};

struct MetricsReport {
  std::vector<double> radii_grid;
  std::vector<InputRecord> records;
  std::vector<MethodSummary> summaries;
};

// Runs the paired protocol: IAS at k_bar (baseline), IAS at each comparison
// size, and ISS per budget, each on an independent stream family.
MetricsReport run_experiment(const ExperimentConfig& config);

// Report serialization (deterministic; wall time lives in the sidecar only).
std::string per_input_csv(const MetricsReport& report);
std::string summary_csv(const MetricsReport& report);
std::string timing_csv(const MetricsReport& report);

// Writes per_input.csv, summary.csv and timing.csv under config.out_dir,
// write-then-rename.
void write_report(const MetricsReport& report, const std::string& out_dir);

// Flat key = value config document.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Atomic text-file IO helpers.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Deterministic shortest-round-trip formatting for report values.
std::string format_double(double v);

// Stream-family salt for a named method; distinct methods get independent
// draw streams under the same master seed.
std::uint64_t method_stream_salt(const std::string& method);

}  // namespace isscert

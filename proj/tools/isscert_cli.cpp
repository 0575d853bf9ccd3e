#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isscert/certify.hpp"
#include "isscert/experiment.hpp"
#include "isscert/mapping.hpp"

namespace {

using namespace isscert;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 0;
  bool threads_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
  cmd->add_option("--out-dir", opts.out_dir, "Output directory");
  cmd->add_option("--seed", opts.seed, "Master seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = hardware)")
      ->each([&](const std::string&) { opts.threads_set = true; });
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig config;
  if (!opts.config_path.empty()) config = load_config_file(opts.config_path);
  if (opts.seed_set) {
    config.master_seed = opts.seed;
    config.population.seed = opts.seed;
  }
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  if (opts.threads_set) config.threads = opts.threads;
  config.validate();
  return config;
}

// Minimal CSV reader for compare: header + rows, no quoting needed.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::istringstream is(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

DeclineBudget parse_budget_token(const std::string& kind, double bound) {
  DeclineBudget b;
  if (kind == "absolute" || kind == "ad") {
    b.kind = DeclineKind::Absolute;
  } else if (kind == "relative" || kind == "rd") {
    b.kind = DeclineKind::Relative;
  } else {
    throw std::invalid_argument("--kind must be absolute|relative");
  }
  b.bound = bound;
  if (!(b.bound > 0.0) ||
      (b.kind == DeclineKind::Relative && !(b.bound < 1.0))) {
    throw std::invalid_argument("--bound out of range for the given kind");
  }
  return b;
}

int run_build_map(const CommonOpts& opts, const std::string& kind, double bound,
                  long k_bar, double alpha, double sigma, double delta,
                  const std::string& out) {
  const DeclineBudget budget = parse_budget_token(kind, bound);
  const MappingTable table = build_mapping(
      delta, budget, k_bar, sigma, alpha, opts.threads_set ? opts.threads : 0);
  write_file_atomic(out, save_mapping(table));
  std::cout << "wrote " << out << " (" << table.grid_points() << " grid points)\n";
  return 0;
}

int run_certify(const CommonOpts& opts) {
  const ExperimentConfig config = resolve_config(opts);
  const OracleModel model = gen_population(config.population);
  MetricsReport report;
  report.radii_grid = config.radii_grid;
  for (const auto& budget : config.budgets) {
    const MappingTable table = build_mapping(config.delta, budget, config.k_bar,
                                             config.sigma, config.alpha,
                                             config.threads);
    const std::string tag =
        budget.kind == DeclineKind::Absolute ? "ad" : "rd";
    const std::string name = "iss_" + tag + "_" + format_double(budget.bound);
    const std::uint64_t salt = method_stream_salt(name);
    for (const auto& in : model.inputs) {
      SimOracle oracle(model, salt);
      const CertificationOutcome out = certify_iss(
          oracle, in.input_id, table, config.k0(), config.alpha, config.sigma);
      InputRecord rec;
      rec.input_id = in.input_id;
      rec.method = name;
      rec.p_a_truth = in.p_a;
      rec.k_hat = out.k_hat;
      rec.samples_consumed = out.samples_consumed;
      if (out.interval) {
        rec.p_low = out.interval->first;
        rec.p_up = out.interval->second;
      }
      rec.p_lower_onesided = out.p_lower_onesided;
      rec.radius = out.radius;
      rec.abstained = out.abstained();
      rec.correct = !out.abstained() && out.prediction == in.true_label;
      rec.diag_flag = out.stage2_argmax_differs;
      rec.analytic_decline = std::numeric_limits<double>::quiet_NaN();
      if (out.k_hat > 0) {
        const auto decline =
            budget.kind == DeclineKind::Absolute
                ? absolute_decline(static_cast<double>(out.k_hat),
                                   static_cast<double>(config.k_bar), in.p_a,
                                   config.sigma, config.alpha)
                : relative_decline(static_cast<double>(out.k_hat),
                                   static_cast<double>(config.k_bar), in.p_a,
                                   config.alpha);
        if (decline) rec.analytic_decline = *decline;
      }
      report.records.push_back(std::move(rec));
    }
  }
  std::filesystem::create_directories(config.out_dir);
  const std::string path =
      (std::filesystem::path(config.out_dir) / "per_input.csv").string();
  write_file_atomic(path, per_input_csv(report));
  std::cout << "wrote " << path << '\n';
  return 0;
}

int run_bench(const CommonOpts& opts) {
  const ExperimentConfig config = resolve_config(opts);
  const MetricsReport report = run_experiment(config);
  write_report(report, config.out_dir);
  std::cout << "wrote report to " << config.out_dir << '\n';
  return 0;
}

int run_compare(const std::string& dir_a, const std::string& dir_b,
                const std::string& out) {
  std::ostringstream os;
  os << "report,method,avg_samples,wall_seconds,acr,mad\n";
  for (const std::string& dir : {dir_a, dir_b}) {
    const auto summary =
        read_csv((std::filesystem::path(dir) / "summary.csv").string());
    const auto timing =
        read_csv((std::filesystem::path(dir) / "timing.csv").string());
    std::map<std::string, std::string> wall;
    for (std::size_t i = 1; i < timing.size(); ++i) {
      wall[timing[i][0]] = timing[i][1];
    }
    for (std::size_t i = 1; i < summary.size(); ++i) {
      const auto& row = summary[i];
      os << dir << ',' << row[0] << ',' << row[1] << ','
         << (wall.count(row[0]) ? wall[row[0]] : "") << ',' << row[2] << ','
         << row[3] << '\n';
    }
  }
  write_file_atomic(out, os.str());
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Input-specific sampling certification for randomized smoothing"};
  app.require_subcommand(1);

  CommonOpts build_opts, certify_opts, bench_opts;

  auto* build = app.add_subcommand("build-map", "Precompute a sample-size mapping table");
  std::string kind = "absolute", map_out = "mapping.json";
  double bound = 0.05, alpha = 0.001, sigma = 0.5, delta = 0.001;
  long k_bar = 100000;
  build->add_option("--kind", kind, "absolute|relative")->capture_default_str();
  build->add_option("--bound", bound, "Decline upper bound U")->capture_default_str();
  build->add_option("--k-bar", k_bar, "Desired sample size")->capture_default_str();
  build->add_option("--alpha", alpha, "Per-stage failure probability")->capture_default_str();
  build->add_option("--sigma", sigma, "Smoothing noise level")->capture_default_str();
  build->add_option("--delta", delta, "Grid step (1/delta integral)")->capture_default_str();
  build->add_option("--out", map_out, "Output table file")->capture_default_str();
  add_common(build, build_opts);

  auto* certify = app.add_subcommand("certify", "Certify a simulated population with ISS");
  add_common(certify, certify_opts);

  auto* bench = app.add_subcommand("bench", "Run the paired ISS/IAS benchmark protocol");
  add_common(bench, bench_opts);

  auto* compare = app.add_subcommand("compare", "Join two bench reports into a trade-off table");
  std::string dir_a, dir_b, cmp_out = "compare.csv";
  compare->add_option("report_a", dir_a, "First report directory")->required();
  compare->add_option("report_b", dir_b, "Second report directory")->required();
  compare->add_option("--out", cmp_out, "Output CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      return run_build_map(build_opts, kind, bound, k_bar, alpha, sigma, delta,
                           map_out);
    }
    if (certify->parsed()) return run_certify(certify_opts);
    if (bench->parsed()) return run_bench(bench_opts);
    if (compare->parsed()) return run_compare(dir_a, dir_b, cmp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

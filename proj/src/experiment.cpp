#include "isscert/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "isscert/decline.hpp"
#include "isscert/stats.hpp"

namespace isscert {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

DeclineBudget parse_budget(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("budget '" + token + "' must be kind:bound");
  }
  const std::string kind = token.substr(0, colon);
  DeclineBudget b;
  if (kind == "absolute" || kind == "ad") {
    b.kind = DeclineKind::Absolute;
  } else if (kind == "relative" || kind == "rd") {
    b.kind = DeclineKind::Relative;
  } else {
    throw std::invalid_argument("unknown budget kind '" + kind + "'");
  }
  b.bound = std::stod(token.substr(colon + 1));
  if (!(b.bound > 0.0) ||
      (b.kind == DeclineKind::Relative && !(b.bound < 1.0))) {
    throw std::invalid_argument("budget bound out of range in '" + token + "'");
  }
  return b;
}

struct MethodPlan {
  std::string name;
  bool is_iss = false;
  long ias_k = 0;                    // IAS only
  const MappingTable* table = nullptr;  // ISS only
};

void run_method(const MethodPlan& plan, const ExperimentConfig& config,
                const OracleModel& model, std::vector<InputRecord>& records,
                double& wall_seconds) {
  const long n = static_cast<long>(model.inputs.size());
  records.assign(n, {});
  const std::uint64_t salt = fnv1a(plan.name);
  const long k0 = config.k0();

  const auto start = std::chrono::steady_clock::now();
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      const InputSpec& in = model.inputs[i];
      SimOracle oracle(model, salt);
      CertificationOutcome out;
      if (plan.is_iss) {
        out = certify_iss(oracle, in.input_id, *plan.table, k0, config.alpha,
                          config.sigma);
      } else {
        out = certify_ias(oracle, in.input_id, plan.ias_k, config.sigma,
                          config.alpha);
      }
      InputRecord& rec = records[i];
      rec.input_id = in.input_id;
      rec.method = plan.name;
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
      if (out.k_hat >= 1 && out.k_hat <= config.k_bar) {
        const auto ad = absolute_decline(static_cast<double>(out.k_hat),
                                         static_cast<double>(config.k_bar),
                                         in.p_a, config.sigma, config.alpha);
        rec.analytic_decline =
            ad ? *ad : std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.analytic_decline = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  unsigned threads = config.threads ? config.threads
                                    : std::thread::hardware_concurrency();
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
}

MethodSummary summarize(const std::string& name, const ExperimentConfig& config,
                        const std::vector<InputRecord>& recs,
                        const std::vector<InputRecord>& baseline,
                        double wall_seconds) {
  MethodSummary s;
  s.method = name;
  s.wall_seconds = wall_seconds;
  const double n = static_cast<double>(recs.size());
  double sum_samples = 0.0, sum_acr = 0.0;
  long abstains = 0;
  for (const auto& r : recs) {
    sum_samples += static_cast<double>(r.samples_consumed);
    if (r.correct) sum_acr += r.radius;
    if (r.abstained) ++abstains;
    if (std::isfinite(r.analytic_decline)) {
      s.analytic_mad = std::max(s.analytic_mad, r.analytic_decline);
    }
  }
  s.avg_samples = sum_samples / n;
  s.acr = sum_acr / n;
  s.abstain_rate = static_cast<double>(abstains) / n;
  s.ca.reserve(config.radii_grid.size());
  for (double r : config.radii_grid) {
    long hits = 0;
    for (const auto& rec : recs) {
      if (rec.correct && rec.radius > r) ++hits;
    }
    s.ca.push_back(static_cast<double>(hits) / n);
  }
  // MAD against the k_bar baseline, over inputs both runs got right.
  double mad = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].correct && baseline[i].correct) {
      mad = std::max(mad, baseline[i].radius - recs[i].radius);
    }
  }
  s.mad = std::max(mad, 0.0);
  return s;
}

}  // namespace

long ExperimentConfig::k0() const {
  return std::max(1L, std::lround(k0_fraction * static_cast<double>(k_bar)));
}

void ExperimentConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("config: alpha in (0,1)");
  }
  if (k_bar < 2) throw std::invalid_argument("config: k_bar >= 2");
  if (!(k0_fraction > 0.0 && k0_fraction <= 1.0)) {
    throw std::invalid_argument("config: k0_fraction in (0,1]");
  }
  for (std::size_t i = 1; i < radii_grid.size(); ++i) {
    if (!(radii_grid[i] > radii_grid[i - 1])) {
      throw std::invalid_argument("config: radii_grid strictly increasing");
    }
  }
  if (!radii_grid.empty() && radii_grid.front() < 0.0) {
    throw std::invalid_argument("config: radii_grid nonnegative");
  }
  for (long k : ias_ks) {
    if (k < 2) throw std::invalid_argument("config: ias_ks entries >= 2");
  }
  for (const auto& b : budgets) {
    if (!(b.bound > 0.0) ||
        (b.kind == DeclineKind::Relative && !(b.bound < 1.0))) {
      throw std::invalid_argument("config: budget bound out of range");
    }
  }
}

MetricsReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const OracleModel model = gen_population(config.population);

  std::vector<MappingTable> tables;
  tables.reserve(config.budgets.size());
  for (const auto& b : config.budgets) {
    tables.push_back(build_mapping(config.delta, b, config.k_bar, config.sigma,
                                   config.alpha, config.threads));
  }

  std::vector<MethodPlan> plans;
  plans.push_back({"ias_baseline", false, config.k_bar, nullptr});
  for (long k : config.ias_ks) {
    plans.push_back({"ias_" + std::to_string(k), false, k, nullptr});
  }
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& b = config.budgets[i];
    const std::string tag =
        b.kind == DeclineKind::Absolute ? "ad" : "rd";
    plans.push_back({"iss_" + tag + "_" + format_double(b.bound), true, 0,
                     &tables[i]});
  }

  MetricsReport report;
  report.radii_grid = config.radii_grid;
  std::vector<std::vector<InputRecord>> per_method(plans.size());
  std::vector<double> walls(plans.size(), 0.0);
  for (std::size_t m = 0; m < plans.size(); ++m) {
    run_method(plans[m], config, model, per_method[m], walls[m]);
  }
  for (std::size_t m = 0; m < plans.size(); ++m) {
    report.summaries.push_back(summarize(plans[m].name, config, per_method[m],
                                         per_method[0], walls[m]));
    report.records.insert(report.records.end(), per_method[m].begin(),
                          per_method[m].end());
  }
  return report;
}

std::uint64_t method_stream_salt(const std::string& method) {
  return fnv1a(method);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string per_input_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "input_id,method,p_a_truth,k_hat,samples_consumed,p_low,p_up,"
        "p_lower_onesided,radius,correct,abstained,diag_flags,"
        "analytic_decline\n";
  for (const auto& r : report.records) {
    os << r.input_id << ',' << r.method << ',' << format_double(r.p_a_truth)
       << ',' << r.k_hat << ',' << r.samples_consumed << ','
       << format_double(r.p_low) << ',' << format_double(r.p_up) << ','
       << format_double(r.p_lower_onesided) << ',' << format_double(r.radius)
       << ',' << (r.correct ? 1 : 0) << ',' << (r.abstained ? 1 : 0) << ','
       << (r.diag_flag ? "stage2_argmax_differs" : "") << ','
       << format_double(r.analytic_decline) << '\n';
  }
  return os.str();
}

std::string summary_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "method,avg_samples,acr,mad,analytic_mad,abstain_rate";
  for (double r : report.radii_grid) os << ",ca_at_" << format_double(r);
  os << '\n';
  for (const auto& s : report.summaries) {
    os << s.method << ',' << format_double(s.avg_samples) << ','
       << format_double(s.acr) << ',' << format_double(s.mad) << ','
       << format_double(s.analytic_mad) << ','
       << format_double(s.abstain_rate);
    for (double ca : s.ca) os << ',' << format_double(ca);
    os << '\n';
  }
  return os.str();
}

std::string timing_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "method,wall_seconds\n";
  for (const auto& s : report.summaries) {
    os << s.method << ',' << format_double(s.wall_seconds) << '\n';
  }
  return os.str();
}

void write_report(const MetricsReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_file_atomic((dir / "per_input.csv").string(), per_input_csv(report));
  write_file_atomic((dir / "summary.csv").string(), summary_csv(report));
  write_file_atomic((dir / "timing.csv").string(), timing_csv(report));
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    os << content;
    if (!os.flush()) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed for '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  bool population_seed_set = false;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "population.kind") {
        config.population.kind = population_kind_from_name(value);
      } else if (key == "population.count") {
        config.population.count = std::stol(value);
      } else if (key == "population.label_count") {
        config.population.label_count = std::stoi(value);
      } else if (key == "population.accuracy") {
        config.population.accuracy = std::stod(value);
      } else if (key == "population.seed") {
        config.population.seed = std::stoull(value);
        population_seed_set = true;
      } else if (key == "population.point_mass_p") {
        config.population.point_mass_p = std::stod(value);
      } else if (key == "population.beta_a") {
        config.population.beta_a = std::stod(value);
      } else if (key == "population.beta_b") {
        config.population.beta_b = std::stod(value);
      } else if (key == "sigma") {
        config.sigma = std::stod(value);
      } else if (key == "alpha") {
        config.alpha = std::stod(value);
      } else if (key == "k_bar") {
        config.k_bar = std::stol(value);
      } else if (key == "k0_fraction") {
        config.k0_fraction = std::stod(value);
      } else if (key == "delta") {
        config.delta = std::stod(value);
      } else if (key == "budgets") {
        config.budgets.clear();
        for (const auto& tok : split_list(value)) {
          config.budgets.push_back(parse_budget(tok));
        }
      } else if (key == "radii_grid") {
        config.radii_grid.clear();
        for (const auto& tok : split_list(value)) {
          config.radii_grid.push_back(std::stod(tok));
        }
      } else if (key == "ias_ks") {
        config.ias_ks.clear();
        for (const auto& tok : split_list(value)) {
          config.ias_ks.push_back(std::stol(tok));
        }
      } else if (key == "seed") {
        config.master_seed = std::stoull(value);
      } else if (key == "threads") {
        config.threads = static_cast<unsigned>(std::stoul(value));
      } else if (key == "out_dir") {
        config.out_dir = value;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  " (" + key + "): " + e.what());
    }
  }
  if (!population_seed_set) config.population.seed = config.master_seed;
  config.validate();
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config_text(read_file(path));
}

}  // namespace isscert

#include "isscert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isscert/stats.hpp"

namespace isscert {

namespace {

constexpr std::uint64_t kPopulationStream = 0x706f70756c617465ull;

double draw_top_mass(const PopulationSpec& spec, double u, double v) {
  switch (spec.kind) {
    case PopulationKind::ConcentratedHigh: {
      double b = beta_quantile(std::min(std::max(u, 1e-12), 1.0 - 1e-12),
                               spec.beta_a, spec.beta_b);
      return std::min(0.5 + 0.5 * b, 1.0);
    }
    case PopulationKind::Uniform:
      return 0.5 + 0.5 * u;
    case PopulationKind::PointMass:
      return spec.point_mass_p;
    case PopulationKind::TwoClusters:
      return v < 0.5 ? 0.6 : 0.99;
  }
  throw std::logic_error("draw_top_mass: unknown population kind");
}

}  // namespace

const InputSpec& OracleModel::input(int input_id) const {
  if (input_id < 0 || input_id >= static_cast<int>(inputs.size()) ||
      inputs[input_id].input_id != input_id) {
    throw std::out_of_range("OracleModel: unknown input_id");
  }
  return inputs[input_id];
}

OracleModel gen_population(const PopulationSpec& spec) {
  if (spec.count < 1) throw std::invalid_argument("gen_population: count >= 1");
  if (spec.label_count < 1) {
    throw std::invalid_argument("gen_population: label_count >= 1");
  }
  if (!(spec.accuracy >= 0.0 && spec.accuracy <= 1.0)) {
    throw std::invalid_argument("gen_population: accuracy in [0,1]");
  }
  OracleModel model;
  model.label_count = spec.label_count;
  model.master_seed = spec.seed;
  model.inputs.reserve(spec.count);

  const int n_labels = spec.label_count;
  for (long i = 0; i < spec.count; ++i) {
    CounterRng rng(spec.seed, kPopulationStream, static_cast<std::uint64_t>(i));
    InputSpec in;
    in.input_id = static_cast<int>(i);
    const double top_mass = draw_top_mass(spec, rng.uniform(0), rng.uniform(1));
    in.true_label = static_cast<int>(rng.uniform(2) * n_labels) % n_labels;
    const bool correct = rng.uniform(3) < spec.accuracy;
    int top;
    if (correct || n_labels == 1) {
      top = in.true_label;
    } else {
      const int offset =
          1 + static_cast<int>(rng.uniform(4) * (n_labels - 1)) % (n_labels - 1);
      top = (in.true_label + offset) % n_labels;
    }
    in.label_probs.assign(n_labels, n_labels > 1
                                        ? (1.0 - top_mass) / (n_labels - 1)
                                        : 0.0);
    in.label_probs[top] = n_labels > 1 ? top_mass : 1.0;
    // Derived fields follow the realized vector.
    const auto it = std::max_element(in.label_probs.begin(), in.label_probs.end());
    in.top_label = static_cast<int>(it - in.label_probs.begin());
    in.p_a = *it;
    model.inputs.push_back(std::move(in));
  }
  return model;
}

SimOracle::SimOracle(const OracleModel& model, std::uint64_t stream_salt)
    : model_(&model), salt_(stream_salt) {}

std::vector<int> SimOracle::sample(int input_id, long n) {
  if (n < 0) throw std::invalid_argument("SimOracle::sample: n >= 0");
  const InputSpec& in = model_->input(input_id);
  CounterRng rng(model_->master_seed, salt_, static_cast<std::uint64_t>(input_id) + 1);
  std::uint64_t& pos = positions_[input_id];
  std::vector<int> labels;
  labels.reserve(n);
  const int last = static_cast<int>(in.label_probs.size()) - 1;
  for (long i = 0; i < n; ++i) {
    const double u = rng.uniform(pos++);
    double acc = 0.0;
    int label = last;
    for (int c = 0; c <= last; ++c) {
      acc += in.label_probs[c];
      if (u < acc) {
        label = c;
        break;
      }
    }
    labels.push_back(label);
  }
  return labels;
}

PopulationKind population_kind_from_name(const std::string& name) {
  if (name == "concentrated_high") return PopulationKind::ConcentratedHigh;
  if (name == "uniform") return PopulationKind::Uniform;
  if (name == "point_mass") return PopulationKind::PointMass;
  if (name == "two_clusters") return PopulationKind::TwoClusters;
  throw std::invalid_argument("unknown population kind '" + name + "'");
}

const char* population_kind_name(PopulationKind kind) {
  switch (kind) {
    case PopulationKind::ConcentratedHigh: return "concentrated_high";
    case PopulationKind::Uniform: return "uniform";
    case PopulationKind::PointMass: return "point_mass";
    case PopulationKind::TwoClusters: return "two_clusters";
  }
  return "unknown";
}

}  // namespace isscert

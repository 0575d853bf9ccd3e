#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "isscert/rng.hpp"

namespace isscert {

// Behavior contract for the sampling step: produce n label draws for an
// input. Draws at a given stream position are reproducible under the same
// master seed; successive calls continue the stream.
class ClassifierOracle {
 public:
  virtual ~ClassifierOracle() = default;
  virtual std::vector<int> sample(int input_id, long n) = 0;
};

// One simulated input: a categorical label law with known top mass p_A.
struct InputSpec {
  int input_id = 0;
  int true_label = 0;
  std::vector<double> label_probs;
  double p_a = 0.0;   // max(label_probs)
  int top_label = 0;  // argmax, smallest id on ties
};

struct OracleModel {
  std::vector<InputSpec> inputs;
  int label_count = 0;
  std::uint64_t master_seed = 0;

  const InputSpec& input(int input_id) const;
};

enum class PopulationKind { ConcentratedHigh, Uniform, PointMass, TwoClusters };

struct PopulationSpec {
  PopulationKind kind = PopulationKind::ConcentratedHigh;
  long count = 500;
  int label_count = 10;
  double accuracy = 1.0;  // fraction of inputs with top_label == true_label
  std::uint64_t seed = 0;
  double point_mass_p = 1.0;      // PointMass only
  double beta_a = 5.0;            // ConcentratedHigh: p_A = 0.5 + 0.5 * Beta(a, b)
  double beta_b = 0.5;
};

// Generates a population whose p_A values follow the requested law.
OracleModel gen_population(const PopulationSpec& spec);

// Simulated base classifier over an OracleModel. Per-input counter-based
// streams keyed by (master_seed, stream_salt, input_id): sampling order
// across inputs cannot change any input's draw sequence.
class SimOracle : public ClassifierOracle {
 public:
  explicit SimOracle(const OracleModel& model, std::uint64_t stream_salt = 0);

  std::vector<int> sample(int input_id, long n) override;
  void reset_streams() { positions_.clear(); }

 private:
  const OracleModel* model_;
  std::uint64_t salt_;
  std::unordered_map<int, std::uint64_t> positions_;
};

PopulationKind population_kind_from_name(const std::string& name);
const char* population_kind_name(PopulationKind kind);

}  // namespace isscert

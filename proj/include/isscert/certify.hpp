#pragma once

#include <optional>
#include <utility>

#include "isscert/mapping.hpp"
#include "isscert/oracle.hpp"

namespace isscert {

constexpr int kAbstain = -1;

struct CertificationOutcome {
  int prediction = kAbstain;  // label id, or kAbstain
  double radius = 0.0;        // 0 when abstaining
  double p_lower_onesided = 0.0;
  std::optional<std::pair<double, double>> interval;  // stage-1 (ISS only)
  long k_hat = 0;             // chosen sample size (ISS only)
  long samples_consumed = 0;
  // Set when the stage-2 argmax differs from the stage-1 prediction.
  bool stage2_argmax_differs = false;

  bool abstained() const { return prediction == kAbstain; }
};

// Standard two-step certification; IAS is this procedure at reduced k.
CertificationOutcome certify_ias(ClassifierOracle& oracle, int input_id, long k,
                                 double sigma, double alpha);

// Two-stage certification with input-specific sampling: a loose two-sided
// interval from k0 draws picks the sample size via the mapping table, then
// the one-sided bound is taken over the first k_hat draws (stage-1 draws
// are reused). k_hat = 0 short-circuits to ABSTAIN.
CertificationOutcome certify_iss(ClassifierOracle& oracle, int input_id,
                                 const MappingTable& table, long k0,
                                 double alpha, double sigma);

// Stage-1 top label only (kAbstain never returned; k0 >= 1 enforced).
int predict_only(ClassifierOracle& oracle, int input_id, long k0, double alpha);

}  // namespace isscert

#include "isscert/certify.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "isscert/stats.hpp"

namespace isscert {

namespace {

// Top label with smallest-id tie-break, over labels[0..n).
SampleCounts count_top(const std::vector<int>& labels, long n) {
  SampleCounts counts;
  counts.total = n;
  if (n == 0) return counts;
  int max_label = 0;
  for (long i = 0; i < n; ++i) max_label = std::max(max_label, labels[i]);
  std::vector<long> tally(max_label + 1, 0);
  for (long i = 0; i < n; ++i) ++tally[labels[i]];
  counts.top_label = 0;
  counts.top_count = tally[0];
  for (int c = 1; c <= max_label; ++c) {
    if (tally[c] > counts.top_count) {
      counts.top_count = tally[c];
      counts.top_label = c;
    }
  }
  return counts;
}

}  // namespace

CertificationOutcome certify_ias(ClassifierOracle& oracle, int input_id, long k,
                                 double sigma, double alpha) {
  if (k < 2) throw std::invalid_argument("certify_ias: k >= 2");
  const std::vector<int> labels = oracle.sample(input_id, k);
  const SampleCounts counts = count_top(labels, k);
  CertificationOutcome out;
  out.samples_consumed = k;
  out.k_hat = k;
  out.p_lower_onesided = cp_lower(alpha, static_cast<double>(counts.top_count),
                                  static_cast<double>(k));
  if (out.p_lower_onesided < 0.5) {
    return out;  // ABSTAIN, radius 0
  }
  out.prediction = counts.top_label;
  out.radius = sigma * std_normal_quantile(out.p_lower_onesided);
  return out;
}

CertificationOutcome certify_iss(ClassifierOracle& oracle, int input_id,
                                 const MappingTable& table, long k0,
                                 double alpha, double sigma) {
  if (k0 < 1) throw std::invalid_argument("certify_iss: k0 >= 1");
  if (k0 > table.k_bar) {
    throw std::invalid_argument("certify_iss: k0 must not exceed table k_bar");
  }
  if (table.alpha != alpha) {
    throw std::invalid_argument("certify_iss: table alpha mismatch");
  }
  if (table.budget.kind == DeclineKind::Absolute && table.sigma != sigma) {
    throw std::invalid_argument("certify_iss: table sigma mismatch");
  }

  // Stage 1: loose two-sided interval from k0 draws.
  std::vector<int> labels = oracle.sample(input_id, k0);
  const SampleCounts stage1 = count_top(labels, k0);
  const auto [p_low, p_up] = cp_two_sided(alpha, stage1.top_count, k0);

  CertificationOutcome out;
  out.interval = {p_low, p_up};
  out.k_hat = std::max(lookup(table, p_low), lookup(table, p_up));
  out.samples_consumed = std::max(out.k_hat, k0);

  if (out.k_hat == 0) {
    // Even k_bar samples cannot clear the budgeted radius floor.
    out.samples_consumed = k0;
    return out;
  }

  // Stage 2: extend to k_hat draws (stage-1 draws are reused) and count
  // over the first k_hat.
  if (out.k_hat > k0) {
    std::vector<int> more = oracle.sample(input_id, out.k_hat - k0);
    labels.insert(labels.end(), more.begin(), more.end());
  }
  const SampleCounts stage2 = count_top(labels, out.k_hat);
  out.stage2_argmax_differs = stage2.top_label != stage1.top_label;
  out.p_lower_onesided =
      cp_lower(alpha, static_cast<double>(stage2.top_count),
               static_cast<double>(out.k_hat));
  if (out.p_lower_onesided < 0.5) {
    return out;  // ABSTAIN
  }
  out.prediction = stage1.top_label;
  out.radius = sigma * std_normal_quantile(out.p_lower_onesided);
  return out;
}

int predict_only(ClassifierOracle& oracle, int input_id, long k0, double) {
  if (k0 < 1) throw std::invalid_argument("predict_only: k0 >= 1");
  const std::vector<int> labels = oracle.sample(input_id, k0);
  return count_top(labels, k0).top_label;
}

}  // namespace isscert

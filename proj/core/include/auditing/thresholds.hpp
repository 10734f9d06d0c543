#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "auditing/oracle.hpp"
#include "auditing/sample_size.hpp"
#include "auditing/types.hpp"

namespace auditing {

// h_a(x) = +1 iff x >= a.
struct ThresholdHyp {
  double a = 0.0;

  Label predict(double x) const { return x >= a ? Label::positive : Label::negative; }
  Label predict(std::span<const double> x) const { return predict(x[0]); }

  bool operator==(const ThresholdHyp&) const = default;
};

struct ThresholdFit {
  ThresholdHyp hypothesis;
  std::uint64_t errors = 0;  // weighted misclassification count
  std::uint64_t weight = 0;  // total weight of the sample

  double error_rate() const {
    return static_cast<double>(errors) / static_cast<double>(weight);
  }
};

// Exact empirical risk minimizer over thresholds. Candidates are, in
// ascending order: the minimum sample value (everything positive), the
// midpoints between consecutive distinct sample values, and max + 1
// (everything negative). The smallest minimizing candidate wins.
// `weights` may be empty (all ones). Throws on an empty sample.
ThresholdFit threshold_erm(std::span<const double> xs, std::span<const Label> ys,
                           std::span<const std::uint64_t> weights = {});
ThresholdFit threshold_erm(const Pool& sample);

// Realizable pool: scan from the largest point down and stop at the first
// negative. At most one negative query.
ThresholdHyp audit_realizable_threshold(AuditOracle& oracle);

// Pool with err(S, thresholds) <= k/m: scan from the top until k+1
// negatives have been seen (or the pool is exhausted) and return the ERM of
// the queried prefix. At most k+1 negative queries.
ThresholdHyp audit_pool_thresholds_k(AuditOracle& oracle, std::size_t k);

// Representative subset of a one-dimensional multiset.
//
// U holds `blocks` copies of every point, sorted ascending (ties by input
// position); it is never materialized because the copies of each point are
// adjacent, so U[j] = sorted_order[j / blocks]. Block t covers U positions
// [t*block_size, (t+1)*block_size), and `draws_per_block` uniform draws
// (with replacement) are taken from each block.
struct SubsetSelection {
  std::size_t blocks = 1;           // T
  std::size_t draws_per_block = 0;  // W
  std::size_t block_size = 0;       // m, the input size
  std::vector<std::size_t> sorted_order;
  std::vector<std::size_t> selected;  // input positions, |selected| = T * W

  std::size_t u_size() const { return blocks * block_size; }
  std::size_t u_at(std::size_t j) const { return sorted_order[j / blocks]; }
  std::pair<std::size_t, std::size_t> block_range(std::size_t t) const {
    return {t * block_size, (t + 1) * block_size};
  }
};

// eta_max > 0 and delta in (0, 1]. T = max(floor(1/(3 eta_max)), 1),
// W = ceil(14 ln(8/delta)).
SubsetSelection representative_subset(std::span<const double> xs, double eta_max,
                                      double delta, Rng& rng);
SubsetSelection representative_subset(const Pool& pool, double eta_max, double delta,
                                      Rng& rng);

struct ThresholdAuditParams {
  double eta_max = 0.05;
  double alpha = 0.5;
  double delta = 0.2;
  SampleSizeConfig sizes = SampleSizeConfig::desk();
  bool with_replacement = true;  // draws of S from S_0 and S_2 from S_1
};

struct LedgerCheckpoint {
  std::string step;
  CostLedger ledger;
};

struct ThresholdAuditResult {
  ThresholdHyp hypothesis;
  ThresholdHyp coarse_hypothesis;  // ERM on the labeled part of S_q
  CostLedger ledger;
  std::vector<LedgerCheckpoint> checkpoints;

  double nu = 0.0;
  std::size_t s0_size = 0;
  std::size_t s_size = 0;
  std::size_t sq_size = 0;
  std::uint64_t scan_cap = 0;             // ceil(12 |S_q| (1+nu) eta_max) + 1
  std::uint64_t scan_negatives_seen = 0;  // negatives observed in the S_q scan
  std::uint64_t scan_negative_queries = 0;
  std::size_t s1_size = 0;
  std::size_t s2_size = 0;
};

// Agnostic auditing for thresholds with a known bound eta_max on the
// best-in-class error. Requires eta_max, alpha, delta in (0, 1) and
// (1 + alpha/5) eta_max <= 1; `dist` must be one-dimensional.
ThresholdAuditResult audit_thresholds_agnostic(const Distribution& dist,
                                               const ThresholdAuditParams& params,
                                               Rng& rng);

// Brute-force best-in-class error count of a pool (every cut position).
std::uint64_t threshold_class_errors(const Pool& pool);

}  // namespace auditing

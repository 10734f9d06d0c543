#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "auditing/oracle.hpp"
#include "auditing/sample_size.hpp"
#include "auditing/types.hpp"

namespace auditing {

enum class Polarity {
  outside_positive,  // h_a: positive iff some x[i] >= a[i]
  outside_negative,  // h_a^-: the label-flipped counterpart
};

// Disjunction of one-sided thresholds over the positive orthant.
struct DisjunctionHyp {
  std::vector<double> a;
  Polarity polarity = Polarity::outside_positive;

  Label predict(std::span<const double> x) const {
    bool outside = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (x[i] >= a[i]) {
        outside = true;
        break;
      }
    }
    const bool positive = outside == (polarity == Polarity::outside_positive);
    return positive ? Label::positive : Label::negative;
  }

  bool operator==(const DisjunctionHyp&) const = default;
};

// x in R^d to R_+^{2d}: positive parts first, then negative parts.
std::vector<double> map_to_orthant(std::span<const double> x);
Pool map_to_orthant(const Pool& pool);

// Realizable pool: for each coordinate, scan from the largest value down
// and stop at the first negative; already-revealed points are re-read for
// free. At most d negative queries.
DisjunctionHyp audit_realizable_disjunction(AuditOracle& oracle);

enum class SearchMode {
  automatic,  // exact when d <= 2, or d == 3 on small samples
  exact,      // candidate-grid optimum
  heuristic,  // coordinate descent with random restarts
};

struct DisjunctionSearchOptions {
  SearchMode mode = SearchMode::automatic;
  std::size_t restarts = 16;
  std::uint64_t seed = 0x5eedULL;
};

struct DisjunctionFit {
  DisjunctionHyp hypothesis;
  std::uint64_t errors = 0;
  std::uint64_t size = 0;
  bool exact = false;

  double error_rate() const {
    return static_cast<double>(errors) / static_cast<double>(size);
  }
};

// Minimizes err(sample, h_a) over a >= lower_bound. Per coordinate the
// candidates are lower_bound[i], the midpoints between consecutive distinct
// sample values at or above it, and the largest value + 1. Ties go to the
// lexicographically smallest candidate-index vector.
DisjunctionFit disjunction_erm(const Pool& sample, std::span<const double> lower_bound,
                               const DisjunctionSearchOptions& options = {});

struct NegativeErrorBound {
  double value = 0.0;
  std::uint64_t negative_errors = 0;
  DisjunctionHyp witness;
  bool exact = false;
};

// max err_neg(sample, h) over h in V_nu(sample, eps, H[lower_bound]), where
// best_err must be the class minimum on the sample. In heuristic mode the
// value is a lower bound on the true maximum.
NegativeErrorBound max_err_neg_over_version_space(const Pool& sample, double eps,
                                                  double nu,
                                                  std::span<const double> lower_bound,
                                                  double best_err,
                                                  const DisjunctionSearchOptions& options = {});

struct RectangleAuditParams {
  double eta_min = 0.1;
  double alpha = 1.0;
  double delta = 0.2;
  SampleSizeConfig sizes = SampleSizeConfig::desk();
  DisjunctionSearchOptions search;
};

struct RoundTrace {
  unsigned t = 0;
  double eta_t = 1.0;
  std::size_t sample_size = 0;
  std::uint64_t scan_cap = 0;  // ceil((1+nu) eta_t |S_t|) + 1
  std::vector<double> b;
  std::vector<std::uint64_t> direction_negatives;
  std::vector<std::uint64_t> direction_queries;
  double best_err = 0.0;
  double eta_hat = 0.0;
  bool exact_search = true;
  bool stopped = false;
};

struct RectangleAuditResult {
  DisjunctionHyp hypothesis;
  CostLedger ledger;
  std::vector<RoundTrace> rounds;
  double nu = 0.0;
};

// Agnostic auditing for disjunctions of thresholds. Requires eta_min and
// delta in (0, 1) and alpha in (0, 1].
RectangleAuditResult audit_rectangles_agnostic(const Distribution& dist,
                                               const RectangleAuditParams& params,
                                               Rng& rng);

// One JSON object per round: t, eta_t, sample_size, b, eta_hat and the
// per-direction negative counts.
std::string round_trace_to_json_line(const RoundTrace& round);

// Revealed labels that no hypothesis of the given polarity can produce
// together: for outside_negative, a revealed negative that is dominated
// coordinate-wise by a revealed positive; for outside_positive, a revealed
// positive dominated by a revealed negative. Returns (dominated, dominating).
std::optional<std::pair<std::size_t, std::size_t>> find_dominance_violation(
    const AuditOracle& oracle, Polarity polarity);

}  // namespace auditing

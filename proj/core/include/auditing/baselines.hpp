#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "auditing/oracle.hpp"
#include "auditing/rectangles.hpp"
#include "auditing/thresholds.hpp"
#include "auditing/types.hpp"

namespace auditing {

// Bisection over the sorted pool (midpoint rounded down). Assumes a
// realizable pool and makes at most ceil(log2 m) + 1 queries. The returned
// threshold uses the same placement as audit_realizable_threshold.
ThresholdHyp binary_search_active(AuditOracle& oracle);

enum class HypothesisClass { thresholds, disjunctions };

std::string to_string(HypothesisClass cls);
HypothesisClass hypothesis_class_from_string(std::string_view name);

using AnyHypothesis = std::variant<ThresholdHyp, DisjunctionHyp>;

struct PassiveResult {
  AnyHypothesis hypothesis;
  CostLedger ledger;
};

// Draws n examples, reveals every label through a metered oracle and
// returns the class ERM.
PassiveResult passive_erm(const Distribution& dist, std::size_t n, HypothesisClass cls, Rng& rng,
                          const DisjunctionSearchOptions& search = {});

}  // namespace auditing

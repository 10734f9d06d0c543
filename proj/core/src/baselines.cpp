#include "auditing/baselines.hpp"

#include <stdexcept>

#include "ordering.hpp"

namespace auditing {

ThresholdHyp binary_search_active(AuditOracle& oracle) {
  if (oracle.dim() != 1) throw std::invalid_argument("binary search needs a one-dimensional pool");
  if (oracle.size() == 0) throw std::invalid_argument("empty pool");
  const auto order =
      detail::ascending_order(oracle.size(), [&](std::size_t i) { return oracle.coord(i, 0); });
  auto x = [&](std::size_t p) { return oracle.coord(order[p], 0); };
  // Find the first sorted position labeled positive.
  std::size_t lo = 0;
  std::size_t hi = order.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (oracle.query(order[mid]) == Label::positive) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo == 0) return ThresholdHyp{x(0)};
  if (lo == order.size()) return ThresholdHyp{x(lo - 1) + 1.0};
  return ThresholdHyp{detail::cut_between(x(lo - 1), x(lo))};
}

std::string to_string(HypothesisClass cls) {
  return cls == HypothesisClass::thresholds ? "thresholds" : "disjunctions";
}

HypothesisClass hypothesis_class_from_string(std::string_view name) {
  if (name == "thresholds") return HypothesisClass::thresholds;
  if (name == "disjunctions" || name == "rectangles") return HypothesisClass::disjunctions;
  throw std::invalid_argument("unknown hypothesis class '" + std::string(name) + "'");
}

PassiveResult passive_erm(const Distribution& dist, std::size_t n, HypothesisClass cls, Rng& rng,
                          const DisjunctionSearchOptions& search) {
  if (n == 0) throw std::invalid_argument("passive ERM needs n >= 1");
  AuditOracle oracle(dist.draw(n, rng));
  for (std::size_t i = 0; i < n; ++i) oracle.query(i);
  const Pool labeled = oracle.revealed_pool(Label::negative);
  PassiveResult out;
  if (cls == HypothesisClass::thresholds) {
    out.hypothesis = threshold_erm(labeled).hypothesis;
  } else {
    const std::vector<double> zero(labeled.dim(), 0.0);
    out.hypothesis = disjunction_erm(labeled, zero, search).hypothesis;
  }
  out.ledger = oracle.ledger();
  return out;
}

}  // namespace auditing

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "auditing/types.hpp"

namespace auditing {

// Counts label queries. negative_queries is the auditing complexity,
// total_queries the active label complexity.
struct CostLedger {
  std::uint64_t negative_queries = 0;
  std::uint64_t total_queries = 0;
  std::optional<std::uint64_t> budget;

  CostLedger& operator+=(const CostLedger& other);
  bool operator==(const CostLedger&) const = default;
};

CostLedger operator+(CostLedger lhs, const CostLedger& rhs);

// {"negative_queries":n,"total_queries":t}; the budget is not serialized.
std::string ledger_to_json(const CostLedger& ledger);
CostLedger ledger_from_json(const std::string& text);

// Raised before a label is revealed when revealing it would push the
// negative-query count past the budget.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("negative-query budget exhausted") {}
};

// Gatekeeper over a pool with hidden labels. Points are free to inspect;
// labels are revealed (and billed) only through query().
class AuditOracle {
 public:
  explicit AuditOracle(Pool pool, std::optional<std::uint64_t> budget = std::nullopt);

  // Reveals the label of point i. The first reveal is billed; later calls
  // return the memoized label at no cost. Throws std::out_of_range for a bad
  // index and BudgetExhausted when a billable negative would exceed budget.
  Label query(std::size_t i);

  bool revealed(std::size_t i) const { return memo_.at(i) != 0; }
  std::optional<Label> revealed_label(std::size_t i) const;

  std::size_t size() const { return pool_.size(); }
  std::size_t dim() const { return pool_.dim(); }
  std::span<const double> point(std::size_t i) const { return pool_.point(i); }
  double coord(std::size_t i, std::size_t k) const { return pool_.coord(i, k); }

  const CostLedger& ledger() const { return ledger_; }

  // Copy of the pool where unrevealed labels are replaced by `fill`.
  Pool revealed_pool(Label fill) const;

 private:
  Pool pool_;
  std::vector<std::int8_t> memo_;  // 0 = hidden, otherwise the label
  CostLedger ledger_;
};

}  // namespace auditing

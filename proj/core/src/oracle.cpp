#include "auditing/oracle.hpp"

#include <nlohmann/json.hpp>

namespace auditing {

CostLedger& CostLedger::operator+=(const CostLedger& other) {
  negative_queries += other.negative_queries;
  total_queries += other.total_queries;
  return *this;
}

CostLedger operator+(CostLedger lhs, const CostLedger& rhs) {
  lhs += rhs;
  return lhs;
}

std::string ledger_to_json(const CostLedger& ledger) {
  return "{\"negative_queries\":" + std::to_string(ledger.negative_queries) +
         ",\"total_queries\":" + std::to_string(ledger.total_queries) + "}";
}

CostLedger ledger_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CostLedger out;
  out.negative_queries = j.at("negative_queries").get<std::uint64_t>();
  out.total_queries = j.at("total_queries").get<std::uint64_t>();
  if (out.negative_queries > out.total_queries) {
    throw std::invalid_argument("ledger has more negative than total queries");
  }
  return out;
}

AuditOracle::AuditOracle(Pool pool, std::optional<std::uint64_t> budget)
    : pool_(std::move(pool)), memo_(pool_.size(), 0) {
  ledger_.budget = budget;
}

Label AuditOracle::query(std::size_t i) {
  if (i >= pool_.size()) {
    throw std::out_of_range("query index " + std::to_string(i) +
                            " outside pool of size " + std::to_string(pool_.size()));
  }
  if (memo_[i] != 0) return static_cast<Label>(memo_[i]);
  const Label y = pool_.label(i);
  if (y == Label::negative && ledger_.budget &&
      ledger_.negative_queries >= *ledger_.budget) {
    throw BudgetExhausted();
  }
  memo_[i] = static_cast<std::int8_t>(y);
  ++ledger_.total_queries;
  if (y == Label::negative) ++ledger_.negative_queries;
  return y;
}

std::optional<Label> AuditOracle::revealed_label(std::size_t i) const {
  const auto v = memo_.at(i);
  if (v == 0) return std::nullopt;
  return static_cast<Label>(v);
}

Pool AuditOracle::revealed_pool(Label fill) const {
  Pool out = pool_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (memo_[i] == 0) out.set_label(i, fill);
  }
  return out;
}

}  // namespace auditing

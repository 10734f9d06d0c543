#include "auditing/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace auditing {

FiniteClassTable::FiniteClassTable(std::vector<std::vector<int>> labels,
                                   std::vector<std::string> hypothesis_ids,
                                   std::vector<std::string> point_ids) {
  if (labels.empty() || labels.front().empty()) {
    throw std::invalid_argument("class table needs at least one row and one column");
  }
  const std::size_t cols = labels.front().size();
  for (const auto& r : labels) {
    if (r.size() != cols) throw std::invalid_argument("class table rows differ in length");
  }
  if (!hypothesis_ids.empty() && hypothesis_ids.size() != labels.size()) {
    throw std::invalid_argument("hypothesis id count does not match the rows");
  }
  if (!point_ids.empty() && point_ids.size() != cols) {
    throw std::invalid_argument("point id count does not match the columns");
  }
  if (point_ids.empty()) {
    for (std::size_t j = 0; j < cols; ++j) point_ids.push_back("p" + std::to_string(j));
  }
  point_ids_ = std::move(point_ids);
  std::map<std::vector<int>, std::size_t> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen.emplace(labels[i], i).second) {
      ++duplicates_removed_;
      continue;
    }
    hypothesis_ids_.push_back(hypothesis_ids.empty() ? "h" + std::to_string(i)
                                                     : hypothesis_ids[i]);
    labels_.push_back(std::move(labels[i]));
  }
}

std::vector<int> FiniteClassTable::alphabet() const {
  std::vector<int> out;
  for (const auto& r : labels_) out.insert(out.end(), r.begin(), r.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool FiniteClassTable::binary() const {
  for (int v : alphabet()) {
    if (v != -1 && v != 1) return false;
  }
  return true;
}

std::optional<std::size_t> FiniteClassTable::find_row(const std::vector<int>& labels) const {
  for (std::size_t r = 0; r < labels_.size(); ++r) {
    if (labels_[r] == labels) return r;
  }
  return std::nullopt;
}

std::size_t mask_count(const RowMask& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

RowMask full_mask(const FiniteClassTable& table) { return RowMask(table.rows(), true); }

VersionSpace version_space(const FiniteClassTable& table,
                           const std::vector<std::pair<std::size_t, int>>& answered) {
  VersionSpace out{full_mask(table), true};
  for (const auto& [point, label] : answered) {
    if (point >= table.cols()) throw std::out_of_range("answered point out of range");
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.at(r, point) != label) out.rows[r] = false;
    }
  }
  out.consistent = mask_count(out.rows) > 0;
  return out;
}

CostSpec CostSpec::outcome(std::vector<std::vector<double>> matrix, std::vector<int> labels) {
  return {CostKind::outcome_matrix, std::move(matrix), std::move(labels)};
}

CostSpec CostSpec::per_hypothesis(std::vector<std::vector<double>> matrix) {
  return {CostKind::hypothesis_matrix, std::move(matrix), {}};
}

double CostSpec::outcome_cost(std::size_t point, int label) const {
  switch (kind) {
    case CostKind::audit: return label == -1 ? 1.0 : 0.0;
    case CostKind::unit: return 1.0;
    case CostKind::outcome_matrix: {
      const auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) throw std::invalid_argument("label missing from the cost matrix");
      return matrix.at(point).at(static_cast<std::size_t>(it - labels.begin()));
    }
    case CostKind::hypothesis_matrix: break;
  }
  throw std::invalid_argument("cost depends on the hypothesis, not only on the outcome");
}

double CostSpec::cost(const FiniteClassTable& table, std::size_t point, std::size_t row) const {
  if (kind == CostKind::hypothesis_matrix) return matrix.at(point).at(row);
  return outcome_cost(point, table.at(row, point));
}

void CostSpec::validate(const FiniteClassTable& table) const {
  if (kind == CostKind::audit || kind == CostKind::unit) return;
  if (matrix.size() != table.cols()) {
    throw std::invalid_argument("cost matrix needs one row per point");
  }
  const std::size_t width = kind == CostKind::outcome_matrix ? labels.size() : table.rows();
  for (const auto& r : matrix) {
    if (r.size() != width) throw std::invalid_argument("cost matrix row has the wrong width");
    for (double c : r) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("costs must be finite and non-negative");
      }
    }
  }
  if (kind == CostKind::outcome_matrix) {
    for (int y : table.alphabet()) {
      if (std::find(labels.begin(), labels.end(), y) == labels.end()) {
        throw std::invalid_argument("cost matrix lacks a column for label " + std::to_string(y));
      }
    }
  }
}

std::vector<std::size_t> disagreement_points(const FiniteClassTable& table, const RowMask& v) {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < table.cols(); ++x) {
    std::optional<int> first;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (!v[r]) continue;
      if (!first) {
        first = table.at(r, x);
      } else if (*first != table.at(r, x)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

double greedy_score(const FiniteClassTable& table, const RowMask& v, const CostSpec& cost,
                    std::size_t point) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::map<int, std::size_t> counts;
  std::size_t total = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (!v[r]) continue;
    ++counts[table.at(r, point)];
    ++total;
  }
  double best = inf;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (!v[r]) continue;
    const std::size_t removed = total - counts[table.at(r, point)];
    const double c = cost.cost(table, point, r);
    double ratio = 0.0;
    if (c == 0.0) {
      ratio = removed > 0 ? inf : 0.0;
    } else {
      ratio = static_cast<double>(removed) / c;
    }
    best = std::min(best, ratio);
  }
  return best;
}

double audit_greedy_score(const FiniteClassTable& table, const RowMask& v, std::size_t point) {
  std::size_t positives = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (v[r] && table.at(r, point) == 1) ++positives;
  }
  return static_cast<double>(positives);
}

std::optional<std::size_t> greedy_select(const FiniteClassTable& table, const RowMask& v,
                                         const CostSpec& cost) {
  if (v.size() != table.rows()) throw std::invalid_argument("mask does not match the table");
  if (mask_count(v) < 2) throw std::invalid_argument("greedy_select needs |V| >= 2");
  const bool fast = cost.kind == CostKind::audit && table.binary();
  std::optional<std::size_t> best;
  double best_score = -1.0;
  for (std::size_t x : disagreement_points(table, v)) {
    const double s = fast ? audit_greedy_score(table, v, x) : greedy_score(table, v, cost, x);
    if (!best || s > best_score) {
      best = x;
      best_score = s;
    }
  }
  return best;
}

namespace {

IdentifyResult run_identify(const FiniteClassTable& table, const CostSpec& cost,
                            const std::function<int(std::size_t)>& answer,
                            std::optional<std::size_t> true_row) {
  cost.validate(table);
  const auto alphabet = table.alphabet();
  IdentifyResult out;
  RowMask v = full_mask(table);
  while (mask_count(v) > 1) {
    const auto x = greedy_select(table, v, cost);
    if (!x) break;
    const int y = answer(*x);
    if (!std::binary_search(alphabet.begin(), alphabet.end(), y)) {
      throw std::invalid_argument("answer " + std::to_string(y) + " is outside the alphabet");
    }
    const double c = true_row ? cost.cost(table, *x, *true_row) : cost.outcome_cost(*x, y);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.at(r, *x) != y) v[r] = false;
    }
    const std::size_t left = mask_count(v);
    out.transcript.entries.push_back({*x, y, c, left});
    out.transcript.total_cost += c;
    if (left == 0) throw std::runtime_error("answers are inconsistent with every hypothesis");
  }
  out.hypothesis = static_cast<std::size_t>(std::find(v.begin(), v.end(), true) - v.begin());
  return out;
}

}  // namespace

IdentifyResult greedy_identify(const FiniteClassTable& table, const CostSpec& cost,
                               std::size_t true_row) {
  if (true_row >= table.rows()) throw std::out_of_range("true row out of range");
  return run_identify(
      table, cost, [&](std::size_t x) { return table.at(true_row, x); }, true_row);
}

IdentifyResult greedy_identify(const FiniteClassTable& table, const CostSpec& cost,
                               const std::function<int(std::size_t)>& answer) {
  if (!cost.outcome_determined()) {
    throw std::invalid_argument("hypothesis-dependent costs need the true row");
  }
  return run_identify(table, cost, answer, std::nullopt);
}

namespace {

class OptSolver {
 public:
  OptSolver(const FiniteClassTable& table, const CostSpec& cost)
      : table_(table), cost_(cost), memo_(std::size_t{1} << table.rows(), kUnset) {
    const auto alphabet = table.alphabet();
    alphabet_ = alphabet;
    // label_masks_[x][k]: rows labeling point x with alphabet_[k].
    label_masks_.assign(table.cols(), std::vector<std::uint32_t>(alphabet.size(), 0));
    for (std::size_t x = 0; x < table.cols(); ++x) {
      for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto k = std::lower_bound(alphabet.begin(), alphabet.end(), table.at(r, x)) -
                       alphabet.begin();
        label_masks_[x][static_cast<std::size_t>(k)] |= std::uint32_t{1} << r;
      }
    }
  }

  double solve(std::uint32_t v) {
    if ((v & (v - 1)) == 0) return 0.0;  // at most one row left
    double& slot = memo_[v];
    if (!std::isnan(slot)) return slot;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < table_.cols(); ++x) {
      std::size_t present = 0;
      for (auto m : label_masks_[x]) present += (m & v) ? 1 : 0;
      if (present < 2) continue;
      double worst = 0.0;
      for (std::size_t k = 0; k < alphabet_.size() && worst < best; ++k) {
        const std::uint32_t sub = label_masks_[x][k] & v;
        if (sub == 0) continue;
        worst = std::max(worst, cost_.outcome_cost(x, alphabet_[k]) + solve(sub));
      }
      best = std::min(best, worst);
    }
    slot = best;
    return best;
  }

 private:
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  const FiniteClassTable& table_;
  const CostSpec& cost_;
  std::vector<double> memo_;
  std::vector<int> alphabet_;
  std::vector<std::vector<std::uint32_t>> label_masks_;
};

}  // namespace

double opt_cost_bruteforce(const FiniteClassTable& table, const CostSpec& cost) {
  if (table.rows() > kOptMaxRows || table.cols() > kOptMaxPoints) {
    throw std::invalid_argument("table exceeds the exact OPT size guard");
  }
  if (!cost.outcome_determined()) {
    throw std::invalid_argument("exact OPT needs an outcome-determined cost");
  }
  cost.validate(table);
  OptSolver solver(table, cost);
  const std::uint32_t all =
      table.rows() == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << table.rows()) - 1;
  return solver.solve(all);
}

double greedy_bound_factor(std::size_t hypotheses) {
  if (hypotheses < 2) return 0.0;
  return std::log(static_cast<double>(hypotheses - 1)) + 1.0;
}

Dominance dominance(const FiniteClassTable& table, std::size_t first, std::size_t second,
                    const RowMask* v) {
  if (!table.binary()) throw std::invalid_argument("dominance needs a binary label alphabet");
  if (first >= table.cols() || second >= table.cols()) {
    throw std::out_of_range("point out of range");
  }
  bool first_only = false;   // some row labels only `first` negative
  bool second_only = false;  // some row labels only `second` negative
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (v && !(*v)[r]) continue;
    const bool a = table.at(r, first) == -1;
    const bool b = table.at(r, second) == -1;
    first_only = first_only || (a && !b);
    second_only = second_only || (b && !a);
  }
  if (first_only && second_only) return Dominance::incomparable;
  if (second_only) return Dominance::query_first;
  if (first_only) return Dominance::query_second;
  return Dominance::equal;
}

}  // namespace auditing

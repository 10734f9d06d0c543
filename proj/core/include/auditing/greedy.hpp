#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace auditing {

// Explicit hypothesis-by-point label matrix. Rows are deduplicated on
// construction; the first id of each distinct row is kept.
class FiniteClassTable {
 public:
  FiniteClassTable() = default;
  // Throws std::invalid_argument for an empty or ragged matrix, or when the
  // id lists do not match its shape. Empty id lists default to h<i> / p<j>.
  FiniteClassTable(std::vector<std::vector<int>> labels,
                   std::vector<std::string> hypothesis_ids = {},
                   std::vector<std::string> point_ids = {});

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return point_ids_.size(); }
  int at(std::size_t row, std::size_t point) const { return labels_[row][point]; }
  const std::vector<int>& row(std::size_t r) const { return labels_[r]; }
  const std::vector<std::string>& hypothesis_ids() const { return hypothesis_ids_; }
  const std::vector<std::string>& point_ids() const { return point_ids_; }
  // Number of input rows dropped as duplicates.
  std::size_t duplicates_removed() const { return duplicates_removed_; }
  // Sorted distinct entries.
  std::vector<int> alphabet() const;
  bool binary() const;
  std::optional<std::size_t> find_row(const std::vector<int>& labels) const;

 private:
  std::vector<std::vector<int>> labels_;
  std::vector<std::string> hypothesis_ids_;
  std::vector<std::string> point_ids_;
  std::size_t duplicates_removed_ = 0;
};

// Subset of table rows.
using RowMask = std::vector<bool>;

std::size_t mask_count(const RowMask& mask);
RowMask full_mask(const FiniteClassTable& table);

struct VersionSpace {
  RowMask rows;
  bool consistent = true;  // false when no row agrees with every answer
};

// Rows agreeing with every (point, label) answer.
VersionSpace version_space(const FiniteClassTable& table,
                           const std::vector<std::pair<std::size_t, int>>& answered);

enum class CostKind {
  audit,              // 1 when the label is -1, else 0
  unit,               // always 1
  outcome_matrix,     // matrix[point][label index], a function of h(x) only
  hypothesis_matrix,  // matrix[point][row], may depend on h beyond h(x)
};

struct CostSpec {
  CostKind kind = CostKind::audit;
  std::vector<std::vector<double>> matrix;
  std::vector<int> labels;  // column labels of an outcome matrix

  static CostSpec audit() { return {}; }
  static CostSpec unit() { return {CostKind::unit, {}, {}}; }
  static CostSpec outcome(std::vector<std::vector<double>> matrix,
                          std::vector<int> labels = {-1, 1});
  static CostSpec per_hypothesis(std::vector<std::vector<double>> matrix);

  bool outcome_determined() const { return kind != CostKind::hypothesis_matrix; }
  // cost(x, h) for row h of the table.
  double cost(const FiniteClassTable& table, std::size_t point, std::size_t row) const;
  // Cost of observing `label` at `point`; outcome-determined kinds only.
  double outcome_cost(std::size_t point, int label) const;
  // Checks shapes and non-negativity against a table.
  void validate(const FiniteClassTable& table) const;
};

// Points on which the rows of V do not all agree.
std::vector<std::size_t> disagreement_points(const FiniteClassTable& table, const RowMask& v);

// min over h in V of |{h' in V : h'(x) != h(x)}| / cost(x, h), with ratio
// +inf for cost 0 and a positive count, and 0 for cost 0 and count 0.
double greedy_score(const FiniteClassTable& table, const RowMask& v, const CostSpec& cost,
                    std::size_t point);

// Audit-cost score: the number of rows of V predicting +1 at the point.
// Equals greedy_score under audit cost at every disagreement point.
double audit_greedy_score(const FiniteClassTable& table, const RowMask& v, std::size_t point);

// Highest-scoring disagreement point, ties to the smallest index; none when
// V induces a single labeling. Throws when |V| < 2.
std::optional<std::size_t> greedy_select(const FiniteClassTable& table, const RowMask& v,
                                         const CostSpec& cost);

struct TranscriptEntry {
  std::size_t point = 0;
  int label = 0;
  double cost = 0.0;
  std::size_t version_space_size = 0;  // after the answer
};

struct QueryTranscript {
  std::vector<TranscriptEntry> entries;
  double total_cost = 0.0;
};

struct IdentifyResult {
  std::size_t hypothesis = 0;
  QueryTranscript transcript;
};

// Runs the greedy rule against the labeling of `true_row` until one row
// remains.
IdentifyResult greedy_identify(const FiniteClassTable& table, const CostSpec& cost,
                               std::size_t true_row);

// Same against an arbitrary answer source. Requires an outcome-determined
// cost; throws std::invalid_argument on an answer outside the alphabet and
// std::runtime_error when the answers refute every row.
IdentifyResult greedy_identify(const FiniteClassTable& table, const CostSpec& cost,
                               const std::function<int(std::size_t)>& answer);

inline constexpr std::size_t kOptMaxRows = 16;
inline constexpr std::size_t kOptMaxPoints = 12;

// Exact minimax identification cost. Throws std::invalid_argument beyond the
// size guard or for costs that are not outcome-determined.
double opt_cost_bruteforce(const FiniteClassTable& table, const CostSpec& cost);

// ln(n - 1) + 1 for n >= 2; 0 for a single hypothesis.
double greedy_bound_factor(std::size_t hypotheses);

enum class Dominance {
  query_first,   // second ⪯ first: the first point is preferable to query
  query_second,  // first ⪯ second
  equal,
  incomparable,
};

// Compares the sets of rows (within v, or all rows) labeling each point -1.
Dominance dominance(const FiniteClassTable& table, std::size_t first, std::size_t second,
                    const RowMask* v = nullptr);

// CSV: header `id,<point ids...>`, one row per hypothesis with -1/1 entries.
FiniteClassTable read_class_table(std::istream& in);
void write_class_table(std::ostream& out, const FiniteClassTable& table);
FiniteClassTable load_class_table(const std::string& path);

// CSV: header `point,<labels...>`, one row per table point.
CostSpec read_cost_matrix(std::istream& in, const FiniteClassTable& table);
void write_cost_matrix(std::ostream& out, const CostSpec& cost, const FiniteClassTable& table);
CostSpec load_cost_matrix(const std::string& path, const FiniteClassTable& table);

}  // namespace auditing

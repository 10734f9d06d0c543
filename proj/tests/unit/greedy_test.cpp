#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "auditing/generators.hpp"
#include "auditing/greedy.hpp"
#include "brute_force.hpp"

namespace auditing {
namespace {

using testing::brute_audit_ratio_score;
using testing::brute_opt;
using Labels = std::vector<std::vector<int>>;

std::vector<int> row_from_bits(std::uint32_t bits, std::size_t points) {
  std::vector<int> row(points);
  for (std::size_t j = 0; j < points; ++j) row[j] = (bits >> j) & 1u ? 1 : -1;
  return row;
}

// Every table whose rows are a subset of {-1,1}^points of size 1..max_rows,
// passed as label matrices.
template <class F>
void for_each_binary_table(std::size_t points, std::size_t max_rows, F f) {
  const std::uint32_t distinct = 1u << points;
  for (std::uint32_t subset = 1; subset < (1u << distinct); ++subset) {
    if (static_cast<std::size_t>(std::popcount(subset)) > max_rows) continue;
    std::vector<std::vector<int>> rows;
    for (std::uint32_t r = 0; r < distinct; ++r) {
      if ((subset >> r) & 1u) rows.push_back(row_from_bits(r, points));
    }
    f(rows);
  }
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

CostSpec random_outcome_cost(Rng& rng, std::size_t points) {
  std::vector<std::vector<double>> m(points, std::vector<double>(2));
  for (auto& r : m) {
    for (auto& c : r) c = static_cast<double>(uniform_index(rng, 4));
  }
  return CostSpec::outcome(std::move(m));
}

double brute_cost(const CostSpec& cost, std::size_t x, int y) {
  switch (cost.kind) {
    case CostKind::audit:
      return y == -1 ? 1.0 : 0.0;
    case CostKind::unit:
      return 1.0;
    default:
      return cost.matrix[x][y == -1 ? 0 : 1];
  }
}

TEST(FiniteClassTable, DeduplicatesRows) {
  const FiniteClassTable t({{1, -1}, {1, -1}, {-1, -1}}, {"a", "b", "c"});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.duplicates_removed(), 1u);
  EXPECT_EQ(t.hypothesis_ids(), (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(t.point_ids(), (std::vector<std::string>{"p0", "p1"}));
  EXPECT_TRUE(t.binary());
  EXPECT_EQ(t.find_row({-1, -1}), std::optional<std::size_t>(1));
  EXPECT_FALSE(t.find_row({1, 1}));
}

TEST(FiniteClassTable, RejectsBadShapes) {
  EXPECT_THROW(FiniteClassTable(Labels{}), std::invalid_argument);
  EXPECT_THROW(FiniteClassTable(Labels{{}}), std::invalid_argument);
  EXPECT_THROW(FiniteClassTable({{1, 1}, {1}}), std::invalid_argument);
  EXPECT_THROW(FiniteClassTable({{1}}, {"a", "b"}), std::invalid_argument);
}

TEST(VersionSpaceOfTable, Examples) {
  const FiniteClassTable t({{-1, -1}, {-1, 1}, {1, 1}});
  EXPECT_EQ(version_space(t, {}).rows, RowMask(3, true));
  const auto one = version_space(t, {{0, -1}});
  EXPECT_EQ(one.rows, (RowMask{true, true, false}));
  EXPECT_TRUE(one.consistent);
  const auto single = version_space(t, {{0, 1}, {1, 1}});
  EXPECT_EQ(mask_count(single.rows), 1u);
  const auto none = version_space(t, {{0, 1}, {1, -1}});
  EXPECT_EQ(mask_count(none.rows), 0u);
  EXPECT_FALSE(none.consistent);
}

TEST(GreedyScore, ZeroCostConventions) {
  const FiniteClassTable t({{-1, 1}, {1, 1}});
  const RowMask v(2, true);
  // Point 0 splits V and the positive answer is free: ratio +inf for that row,
  // 1 for the negative row, so the minimum is 1.
  EXPECT_EQ(greedy_score(t, v, CostSpec::audit(), 0), 1.0);
  // Point 1 removes nothing and costs nothing: 0.
  EXPECT_EQ(greedy_score(t, v, CostSpec::audit(), 1), 0.0);
  const FiniteClassTable free_split(Labels{{-1}, {1}});
  EXPECT_TRUE(std::isinf(greedy_score(free_split, RowMask(2, true),
                                      CostSpec::outcome({{0.0, 0.0}}), 0)));
}

TEST(GreedySelect, RequiresTwoRows) {
  const FiniteClassTable t({{-1, 1}, {1, 1}});
  EXPECT_THROW(greedy_select(t, RowMask{true, false}, CostSpec::audit()), std::invalid_argument);
}

TEST(GreedySelect, NoneWhenLabelingIsFixed) {
  const FiniteClassTable t({{-1, 1}, {1, 1}});
  const auto v = version_space(t, {{0, 1}});
  EXPECT_EQ(mask_count(v.rows), 1u);
  EXPECT_EQ(greedy_select(t, RowMask{true, true}, CostSpec::audit()), std::optional<std::size_t>(0));
}

TEST(GreedySelect, AuditFastPathMatchesRatioDefinition) {
  for (std::size_t points = 1; points <= 4; ++points) {
    for_each_binary_table(points, 8, [&](const std::vector<std::vector<int>>& rows) {
      if (rows.size() < 2) return;
      const FiniteClassTable t(rows);
      const RowMask v(rows.size(), true);
      const auto disagree = disagreement_points(t, v);
      for (std::size_t x : disagree) {
        const double fast = audit_greedy_score(t, v, x);
        ASSERT_EQ(fast, brute_audit_ratio_score(rows, all_rows(rows.size()), x));
        ASSERT_EQ(greedy_score(t, v, CostSpec::audit(), x), fast);
      }
      // Selection through the generic path equals selection by the fast score.
      if (!disagree.empty()) {
        std::size_t best = disagree.front();
        for (std::size_t x : disagree) {
          if (audit_greedy_score(t, v, x) > audit_greedy_score(t, v, best)) best = x;
        }
        ASSERT_EQ(greedy_select(t, v, CostSpec::audit()), std::optional<std::size_t>(best));
      }
    });
  }
}

TEST(GreedySelect, UnitCostSplitsWorstCase) {
  // Threshold labelings on three points; the middle point balances the split.
  const FiniteClassTable t({{-1, -1, -1}, {-1, -1, 1}, {-1, 1, 1}, {1, 1, 1}});
  EXPECT_EQ(greedy_select(t, full_mask(t), CostSpec::unit()), std::optional<std::size_t>(1));
}

TEST(GreedyIdentify, SingleHypothesisNeedsNoQueries) {
  const FiniteClassTable t({{1, -1, 1}});
  const auto r = greedy_identify(t, CostSpec::audit(), 0);
  EXPECT_EQ(r.hypothesis, 0u);
  EXPECT_TRUE(r.transcript.entries.empty());
  EXPECT_EQ(r.transcript.total_cost, 0.0);
}

TEST(GreedyIdentify, CirclePoolAllNegativeCostsEveryPoint) {
  for (std::size_t m = 3; m <= 12; ++m) {
    const auto table = circle_pool(m).table();
    const auto r = greedy_identify(table, CostSpec::audit(), 0);
    EXPECT_EQ(r.hypothesis, 0u);
    EXPECT_EQ(r.transcript.total_cost, static_cast<double>(m));
  }
}

TEST(GreedyIdentify, TranscriptShrinksAndSums) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<int>> rows;
    for (int r = 0; r < 8; ++r) rows.push_back(row_from_bits(uniform_index(rng, 32), 5));
    const FiniteClassTable table(rows);
    const CostSpec cost = random_outcome_cost(rng, 5);
    for (std::size_t truth = 0; truth < table.rows(); ++truth) {
      const auto r = greedy_identify(table, cost, truth);
      EXPECT_EQ(r.hypothesis, truth);
      double sum = 0.0;
      std::size_t prev = table.rows();
      for (const auto& e : r.transcript.entries) {
        EXPECT_LT(e.version_space_size, prev);
        EXPECT_EQ(e.label, table.at(truth, e.point));
        EXPECT_EQ(e.cost, cost.outcome_cost(e.point, e.label));
        prev = e.version_space_size;
        sum += e.cost;
      }
      EXPECT_EQ(prev, 1u);
      EXPECT_EQ(sum, r.transcript.total_cost);
    }
  }
}

TEST(GreedyIdentify, RandomTablesStayWithinTheBound) {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<int>> rows;
    while (rows.size() < 8) {
      auto row = row_from_bits(uniform_index(rng, 32), 5);
      if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    }
    const FiniteClassTable table(rows);
    for (const CostSpec& cost : {CostSpec::audit(), CostSpec::unit(), random_outcome_cost(rng, 5)}) {
      const double opt = opt_cost_bruteforce(table, cost);
      for (std::size_t truth = 0; truth < 8; ++truth) {
        EXPECT_LE(greedy_identify(table, cost, truth).transcript.total_cost,
                  (std::log(7.0) + 1.0) * opt + 1e-12);
      }
    }
  }
}

TEST(GreedyIdentify, AnswerSourceErrors) {
  const FiniteClassTable t({{-1, 1}, {1, 1}, {1, -1}});
  EXPECT_THROW(greedy_identify(t, CostSpec::audit(), [](std::size_t) { return 0; }),
               std::invalid_argument);
  // A label from the alphabet that no remaining row predicts at that point.
  const FiniteClassTable three(Labels{{0, 1}, {1, 2}});
  EXPECT_THROW(greedy_identify(three, CostSpec::unit(), [](std::size_t) { return 2; }),
               std::runtime_error);
  EXPECT_THROW(
      greedy_identify(t, CostSpec::per_hypothesis({{1, 1, 1}, {1, 1, 1}}),
                      [](std::size_t) { return 1; }),
      std::invalid_argument);
}

TEST(GreedyIdentify, HypothesisDependentCostStillRuns) {
  const FiniteClassTable t({{-1, 1}, {1, 1}, {1, -1}});
  const auto cost = CostSpec::per_hypothesis({{1, 2, 3}, {4, 5, 6}});
  const auto r = greedy_identify(t, cost, 2);
  EXPECT_EQ(r.hypothesis, 2u);
  EXPECT_THROW(opt_cost_bruteforce(t, cost), std::invalid_argument);
}

TEST(OptCost, Examples) {
  EXPECT_EQ(opt_cost_bruteforce(FiniteClassTable({{1, -1}}), CostSpec::audit()), 0.0);
  EXPECT_EQ(opt_cost_bruteforce(FiniteClassTable(Labels{{-1}, {1}}), CostSpec::audit()), 1.0);
  EXPECT_EQ(opt_cost_bruteforce(FiniteClassTable({{-1, -1}, {-1, 1}, {1, 1}}), CostSpec::unit()),
            2.0);
}

TEST(OptCost, SizeGuard) {
  std::vector<std::vector<int>> many;
  for (std::uint32_t r = 0; r < 17; ++r) many.push_back(row_from_bits(r, 5));
  EXPECT_THROW(opt_cost_bruteforce(FiniteClassTable(many), CostSpec::unit()), std::invalid_argument);
  EXPECT_THROW(opt_cost_bruteforce(FiniteClassTable({std::vector<int>(13, 1), std::vector<int>(13, -1)}),
                                   CostSpec::unit()),
               std::invalid_argument);
}

TEST(OptCost, MatchesPlainRecursion) {
  Rng rng(8);
  for (std::size_t points = 1; points <= 3; ++points) {
    for_each_binary_table(points, 8, [&](const std::vector<std::vector<int>>& rows) {
      const FiniteClassTable t(rows);
      for (const CostSpec& cost : {CostSpec::audit(), CostSpec::unit(), random_outcome_cost(rng, points)}) {
        const double expected = brute_opt(rows, all_rows(rows.size()), [&](std::size_t x, int y) {
          return brute_cost(cost, x, y);
        });
        ASSERT_EQ(opt_cost_bruteforce(t, cost), expected);
      }
    });
  }
}

TEST(OptCost, InvariantUnderPermutations) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<int>> rows;
    while (rows.size() < 7) {
      auto row = row_from_bits(uniform_index(rng, 64), 6);
      if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    }
    std::vector<std::vector<double>> m(6, std::vector<double>(2));
    for (auto& r : m) {
      for (auto& c : r) c = static_cast<double>(uniform_index(rng, 4));
    }
    const double base = opt_cost_bruteforce(FiniteClassTable(rows), CostSpec::outcome(m));
    std::vector<std::size_t> cols = all_rows(6);
    std::shuffle(cols.begin(), cols.end(), rng);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::vector<std::vector<int>> permuted(rows.size(), std::vector<int>(6));
    std::vector<std::vector<double>> pm(6);
    for (std::size_t j = 0; j < 6; ++j) {
      for (std::size_t r = 0; r < rows.size(); ++r) permuted[r][j] = rows[r][cols[j]];
      pm[j] = m[cols[j]];
    }
    EXPECT_EQ(opt_cost_bruteforce(FiniteClassTable(permuted), CostSpec::outcome(pm)), base);
  }
}

TEST(BoundFactor, Values) {
  EXPECT_EQ(greedy_bound_factor(1), 0.0);
  EXPECT_EQ(greedy_bound_factor(2), 1.0);
  EXPECT_DOUBLE_EQ(greedy_bound_factor(8), std::log(7.0) + 1.0);
}

TEST(BoundOnSmallFamily, EveryTableCostAndTruth) {
  Rng rng(10);
  for (std::size_t points = 1; points <= 3; ++points) {
    for_each_binary_table(points, 8, [&](const std::vector<std::vector<int>>& rows) {
      const FiniteClassTable t(rows);
      std::vector<CostSpec> costs{CostSpec::audit(), CostSpec::unit()};
      for (int k = 0; k < 5; ++k) costs.push_back(random_outcome_cost(rng, points));
      for (const auto& cost : costs) {
        const double bound = greedy_bound_factor(t.rows()) * opt_cost_bruteforce(t, cost);
        for (std::size_t truth = 0; truth < t.rows(); ++truth) {
          ASSERT_LE(greedy_identify(t, cost, truth).transcript.total_cost, bound + 1e-12);
        }
      }
    });
  }
}

TEST(DominanceOrder, Examples) {
  const FiniteClassTable t({{-1, -1, -1, 1}, {-1, 1, -1, -1}, {1, 1, 1, 1}});
  EXPECT_EQ(dominance(t, 0, 2), Dominance::equal);
  // Point 1 is negative only under row 0, a strict subset of point 0's set.
  EXPECT_EQ(dominance(t, 1, 0), Dominance::query_first);
  EXPECT_EQ(dominance(t, 0, 1), Dominance::query_second);
  EXPECT_EQ(dominance(t, 1, 3), Dominance::incomparable);
  EXPECT_THROW(dominance(FiniteClassTable({{0, 1}, {1, 2}}), 0, 1), std::invalid_argument);
}

TEST(DominanceOrder, PreferredPointScoresAtLeastAsHigh) {
  for (std::size_t points = 2; points <= 4; ++points) {
    for_each_binary_table(points, 8, [&](const std::vector<std::vector<int>>& rows) {
      if (rows.size() < 2) return;
      const FiniteClassTable t(rows);
      const RowMask v(rows.size(), true);
      for (std::size_t x = 0; x < points; ++x) {
        for (std::size_t y = 0; y < points; ++y) {
          const auto d = dominance(t, x, y);
          if (d == Dominance::query_first || d == Dominance::equal) {
            ASSERT_GE(audit_greedy_score(t, v, x), audit_greedy_score(t, v, y));
          }
        }
      }
    });
  }
}

TEST(TableCsv, RoundTrip) {
  const FiniteClassTable t({{-1, 1, 1}, {1, 1, -1}}, {"h_a", "h_b"}, {"x", "y", "z"});
  std::stringstream ss;
  write_class_table(ss, t);
  EXPECT_EQ(ss.str(), "id,x,y,z\nh_a,-1,1,1\nh_b,1,1,-1\n");
  const auto back = read_class_table(ss);
  EXPECT_EQ(back.hypothesis_ids(), t.hypothesis_ids());
  EXPECT_EQ(back.point_ids(), t.point_ids());
  EXPECT_EQ(back.row(1), t.row(1));
}

TEST(TableCsv, CostMatrixRoundTrip) {
  const FiniteClassTable t({{-1, 1}, {1, 1}}, {}, {"x", "y"});
  const auto cost = CostSpec::outcome({{2.5, 0.0}, {1.0, 0.125}});
  std::stringstream ss;
  write_cost_matrix(ss, cost, t);
  EXPECT_EQ(ss.str(), "point,-1,1\nx,2.5,0\ny,1,0.125\n");
  const auto back = read_cost_matrix(ss, t);
  EXPECT_EQ(back.matrix, cost.matrix);
  EXPECT_EQ(back.labels, cost.labels);
}

TEST(TableCsv, RejectsBadInput) {
  std::stringstream ragged("id,x,y\nh0,1\n");
  EXPECT_THROW(read_class_table(ragged), std::runtime_error);
  const FiniteClassTable t({{-1, 1}, {1, 1}}, {}, {"x", "y"});
  std::stringstream missing("point,-1,1\nx,1,0\n");
  EXPECT_THROW(read_cost_matrix(missing, t), std::runtime_error);
  std::stringstream negative("point,-1,1\nx,1,0\ny,-1,0\n");
  EXPECT_THROW(read_cost_matrix(negative, t), std::invalid_argument);
}

}  // namespace
}  // namespace auditing

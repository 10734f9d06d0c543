#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "auditing/generators.hpp"
#include "auditing/metrics.hpp"
#include "auditing/thresholds.hpp"
#include "brute_force.hpp"

namespace auditing {
namespace {

using testing::brute_threshold_min_errors;

Pool grid_pool(std::size_t m, double a_star) {
  Pool p(1);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i + 1) / static_cast<double>(m);
    p.add(x, x >= a_star ? Label::positive : Label::negative);
  }
  return p;
}

std::size_t brute_errors(const Pool& p) {
  std::vector<double> xs;
  std::vector<int> ys;
  for (std::size_t i = 0; i < p.size(); ++i) {
    xs.push_back(p.coord(i, 0));
    ys.push_back(to_int(p.label(i)));
  }
  return brute_threshold_min_errors(xs, ys);
}

TEST(ThresholdErm, SeparableSampleCutsBetweenTheClasses) {
  Pool p(1);
  p.add(0.3, Label::negative);
  p.add(0.7, Label::positive);
  const auto fit = threshold_erm(p);
  EXPECT_EQ(fit.errors, 0u);
  EXPECT_GT(fit.hypothesis.a, 0.3);
  EXPECT_LE(fit.hypothesis.a, 0.7);
  EXPECT_EQ(fit.hypothesis.a, 0.5);
}

TEST(ThresholdErm, ReversedLabelsCostHalf) {
  Pool p(1);
  p.add(0.3, Label::positive);
  p.add(0.7, Label::negative);
  EXPECT_EQ(threshold_erm(p).error_rate(), 0.5);
}

TEST(ThresholdErm, AllPositiveTakesSmallestCut) {
  Pool p(1);
  for (double x : {0.4, 0.2, 0.9}) p.add(x, Label::positive);
  const auto fit = threshold_erm(p);
  EXPECT_EQ(fit.errors, 0u);
  EXPECT_LE(fit.hypothesis.a, 0.2);
}

TEST(ThresholdErm, AllNegativeCutsAboveEverything) {
  Pool p(1);
  for (double x : {0.4, 0.2, 0.9}) p.add(x, Label::negative);
  const auto fit = threshold_erm(p);
  EXPECT_EQ(fit.errors, 0u);
  EXPECT_GT(fit.hypothesis.a, 0.9);
}

TEST(ThresholdErm, EmptyThrows) {
  EXPECT_THROW(threshold_erm(Pool(1)), std::invalid_argument);
}

TEST(ThresholdErm, MatchesBruteForceOnRandomSamples) {
  Rng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 15);
    Pool p(1);
    for (std::size_t i = 0; i < n; ++i) {
      p.add(static_cast<double>(uniform_index(rng, 6)) / 5.0,
            bernoulli(rng, 0.5) ? Label::positive : Label::negative);
    }
    const auto fit = threshold_erm(p);
    EXPECT_EQ(fit.errors, brute_errors(p));
    EXPECT_EQ(count_errors(p, fit.hypothesis).errors, fit.errors);
    EXPECT_EQ(threshold_class_errors(p), fit.errors);
  }
}

TEST(ThresholdErm, WeightsActAsMultiplicity) {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 8);
    std::vector<double> xs;
    std::vector<Label> ys;
    std::vector<std::uint64_t> ws;
    Pool expanded(1);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(static_cast<double>(uniform_index(rng, 5)) / 4.0);
      ys.push_back(bernoulli(rng, 0.5) ? Label::positive : Label::negative);
      ws.push_back(uniform_index(rng, 4));
      for (std::uint64_t c = 0; c < ws.back(); ++c) expanded.add(xs.back(), ys.back());
    }
    if (expanded.empty()) continue;
    const auto weighted = threshold_erm(xs, ys, ws);
    const auto plain = threshold_erm(expanded);
    EXPECT_EQ(weighted.errors, plain.errors);
    EXPECT_EQ(weighted.weight, expanded.size());
  }
}

TEST(RealizableThreshold, GridExampleUsesOneNegative) {
  Pool p(1);
  for (int i = 1; i <= 10; ++i) {
    const double x = i / 10.0;
    p.add(x, x >= 0.55 ? Label::positive : Label::negative);
  }
  AuditOracle o(p);
  const auto h = audit_realizable_threshold(o);
  EXPECT_EQ(err_on_sample(p, h), 0.0);
  EXPECT_EQ(o.ledger().negative_queries, 1u);
}

TEST(RealizableThreshold, AllPositiveQueriesEverything) {
  const Pool p = grid_pool(12, 0.0);
  AuditOracle o(p);
  const auto h = audit_realizable_threshold(o);
  EXPECT_EQ(err_on_sample(p, h), 0.0);
  EXPECT_EQ(o.ledger().negative_queries, 0u);
  EXPECT_EQ(o.ledger().total_queries, 12u);
}

TEST(RealizableThreshold, AllNegativeStopsAtOnce) {
  const Pool p = grid_pool(12, 2.0);
  AuditOracle o(p);
  const auto h = audit_realizable_threshold(o);
  EXPECT_EQ(err_on_sample(p, h), 0.0);
  EXPECT_EQ(o.ledger().negative_queries, 1u);
  EXPECT_EQ(o.ledger().total_queries, 1u);
}

TEST(RealizableThreshold, EveryCutOnGridPools) {
  for (std::size_t m : {1u, 2u, 8u, 64u}) {
    for (std::size_t cut = 0; cut <= m; ++cut) {
      const double a = static_cast<double>(cut) / static_cast<double>(m) + 1e-9;
      const Pool p = grid_pool(m, a);
      AuditOracle o(p);
      const auto h = audit_realizable_threshold(o);
      EXPECT_EQ(count_errors(p, h).errors, 0u) << "m=" << m << " cut=" << cut;
      EXPECT_LE(o.ledger().negative_queries, 1u);
    }
  }
}

TEST(RealizableThreshold, DuplicatesAndUnsortedInput) {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    Pool p(1);
    const double a = static_cast<double>(uniform_index(rng, 7)) / 6.0;
    for (int i = 0; i < 20; ++i) {
      const double x = static_cast<double>(uniform_index(rng, 7)) / 6.0;
      p.add(x, x >= a ? Label::positive : Label::negative);
    }
    AuditOracle o(p);
    EXPECT_EQ(count_errors(p, audit_realizable_threshold(o)).errors, 0u);
    EXPECT_LE(o.ledger().negative_queries, 1u);
  }
}

TEST(PoolThresholdsK, ZeroReducesToRealizableScan) {
  for (std::size_t cut = 0; cut <= 16; ++cut) {
    const Pool p = grid_pool(16, cut / 16.0 + 1e-9);
    AuditOracle a(p);
    AuditOracle b(p);
    EXPECT_EQ(audit_pool_thresholds_k(a, 0), audit_realizable_threshold(b));
    EXPECT_EQ(a.ledger(), b.ledger());
  }
}

TEST(PoolThresholdsK, OneFlipBelowThreshold) {
  Pool p = grid_pool(10, 0.55);
  p.set_label(1, Label::positive);
  AuditOracle o(p);
  const auto h = audit_pool_thresholds_k(o, 1);
  EXPECT_EQ(err_on_sample(p, h), 0.1);
  EXPECT_EQ(brute_errors(p), 1u);
  EXPECT_LE(o.ledger().negative_queries, 2u);
}

TEST(PoolThresholdsK, RandomPoolsMatchBruteForce) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = uniform_index(rng, 4);
    Pool p = grid_pool(20, uniform01(rng));
    std::vector<std::size_t> idx(20);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t j = 0; j < k; ++j) {
      const auto i = j + uniform_index(rng, 20 - j);
      std::swap(idx[j], idx[i]);
      p.set_label(idx[j], flip(p.label(idx[j])));
    }
    ASSERT_LE(brute_errors(p), k);
    AuditOracle o(p);
    const auto h = audit_pool_thresholds_k(o, k);
    EXPECT_EQ(count_errors(p, h).errors, brute_errors(p));
    EXPECT_LE(o.ledger().negative_queries, k + 1);
  }
}

TEST(PoolThresholdsK, ExhaustiveSmallPools) {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
      Pool p(1);
      for (std::size_t i = 0; i < m; ++i) {
        p.add(static_cast<double>(i + 1) / static_cast<double>(m),
              (bits >> i) & 1u ? Label::positive : Label::negative);
      }
      const std::size_t best = brute_errors(p);
      for (std::size_t k = best; k <= 3; ++k) {
        AuditOracle o(p);
        const auto h = audit_pool_thresholds_k(o, k);
        ASSERT_EQ(count_errors(p, h).errors, best) << "m=" << m << " bits=" << bits;
        ASSERT_LE(o.ledger().negative_queries, k + 1);
      }
    }
  }
}

TEST(RepresentativeSubset, LargeEtaGivesOneBlock) {
  Rng rng(1);
  const std::vector<double> xs{0.5, 0.1, 0.9};
  const auto s = representative_subset(xs, 0.4, 0.2, rng);
  EXPECT_EQ(s.blocks, 1u);
  EXPECT_EQ(s.u_size(), 3u);
  EXPECT_EQ(s.block_range(0), std::make_pair(std::size_t{0}, std::size_t{3}));
}

TEST(RepresentativeSubset, BlockArithmetic) {
  Rng rng(1);
  const std::vector<double> xs{0.4, 0.3, 0.2, 0.1};
  const auto s = representative_subset(xs, 1.0 / 12.0, 0.2, rng);
  EXPECT_EQ(s.blocks, 4u);
  EXPECT_EQ(s.u_size(), 16u);
  for (std::size_t t = 0; t < 4; ++t) {
    const auto [lo, hi] = s.block_range(t);
    EXPECT_EQ(hi - lo, 4u);
  }
  const auto w = static_cast<std::size_t>(std::ceil(14.0 * std::log(8.0 / 0.2)));
  EXPECT_EQ(s.draws_per_block, w);
  EXPECT_EQ(s.selected.size(), 4 * w);
  EXPECT_EQ(s.sorted_order, (std::vector<std::size_t>{3, 2, 1, 0}));
}

TEST(RepresentativeSubset, DrawsStayInsideTheirBlocks) {
  Rng data(2);
  std::vector<double> xs;
  for (int i = 0; i < 97; ++i) xs.push_back(static_cast<double>(uniform_index(data, 30)) / 29.0);
  Rng rng(3);
  const auto s = representative_subset(xs, 0.03, 0.1, rng);
  std::vector<std::size_t> stable(xs.size());
  std::iota(stable.begin(), stable.end(), 0);
  std::stable_sort(stable.begin(), stable.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  ASSERT_EQ(s.sorted_order, stable);
  std::vector<std::size_t> rank(xs.size());
  for (std::size_t r = 0; r < stable.size(); ++r) rank[stable[r]] = r;
  const std::size_t m = xs.size();
  for (std::size_t t = 0; t < s.blocks; ++t) {
    for (std::size_t w = 0; w < s.draws_per_block; ++w) {
      const std::size_t r = rank[s.selected[t * s.draws_per_block + w]];
      // Copies of rank r occupy U positions [r T, (r+1) T).
      EXPECT_LT(r * s.blocks, (t + 1) * m);
      EXPECT_GT((r + 1) * s.blocks, t * m);
    }
  }
}

// With err(S, thresholds) <= eta_max, the ERM of the selected subset stays
// within 6 eta_max on the subset and 17 eta_max on the pool.
TEST(RepresentativeSubset, SubsetErmStaysAccurate) {
  const double delta = 0.2;
  for (double eta_max : {0.05, 0.1}) {
    int good = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      Rng rng(500 + t);
      const std::size_t m = 1000;
      Pool s = NoisyThreshold(uniform01(rng), 0.0).draw(m, rng);
      const auto flips = static_cast<std::size_t>(std::floor(eta_max * m));
      for (std::size_t j = 0; j < flips; ++j) {
        const auto i = uniform_index(rng, m);
        s.set_label(i, flip(s.label(i)));
      }
      if (threshold_class_errors(s) > eta_max * m) continue;  // never happens, flips <= eta m
      const auto sel = representative_subset(s, eta_max, delta, rng);
      const Pool sq = s.select(sel.selected);
      const auto h = threshold_erm(sq).hypothesis;
      good += err_on_sample(sq, h) <= 6 * eta_max && err_on_sample(s, h) <= 17 * eta_max;
    }
    EXPECT_GE(good, static_cast<int>(std::ceil((1 - delta - 0.05) * trials))) << eta_max;
  }
}

ThresholdAuditParams agnostic_params(double eta_max) {
  ThresholdAuditParams p;
  p.eta_max = eta_max;
  p.alpha = 0.5;
  p.delta = 0.2;
  return p;
}

TEST(AgnosticThresholds, ScanCapAndTotalBound) {
  for (double eta : {0.01, 0.05, 0.1}) {
    for (int seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      const NoisyThreshold dist(0.4, eta);
      const auto r = audit_thresholds_agnostic(dist, agnostic_params(eta), rng);
      EXPECT_EQ(r.nu, 0.1);
      EXPECT_EQ(r.scan_cap, static_cast<std::uint64_t>(std::ceil(
                                12.0 * static_cast<double>(r.sq_size) * 1.1 * eta)) + 1);
      EXPECT_LE(r.scan_negative_queries, r.scan_cap);
      EXPECT_LE(r.ledger.negative_queries, r.scan_cap + r.s2_size);
      EXPECT_LE(r.ledger.negative_queries, r.ledger.total_queries);
    }
  }
}

TEST(AgnosticThresholds, FinalSampleSizeIgnoresEta) {
  std::size_t s2 = 0;
  for (double eta : {0.01, 0.02, 0.05, 0.1}) {
    Rng rng(1);
    const auto r = audit_thresholds_agnostic(NoisyThreshold(0.4, eta), agnostic_params(eta), rng);
    if (s2 == 0) s2 = r.s2_size;
    EXPECT_EQ(r.s2_size, s2);
    EXPECT_EQ(r.s2_size, m_ag(0.1 / 72, 0.1, 1, SampleSizeConfig::desk()));
  }
}

TEST(AgnosticThresholds, SampleSizesFollowTheSchedule) {
  Rng rng(3);
  const double eta = 0.05;
  const auto r = audit_thresholds_agnostic(NoisyThreshold(0.4, eta), agnostic_params(eta), rng);
  const auto desk = SampleSizeConfig::desk();
  EXPECT_EQ(r.s0_size, m_nu(eta, 0.1, 1, 0.1, desk));
  EXPECT_EQ(r.s_size, m_ag(1.1 * eta, 0.1, 1, desk));
  EXPECT_LE(r.s1_size, 2 * static_cast<std::size_t>(std::ceil(36 * 1.1 * eta * r.s0_size)));
  ASSERT_FALSE(r.checkpoints.empty());
  EXPECT_EQ(r.checkpoints.back().ledger, r.ledger);
  for (std::size_t i = 1; i < r.checkpoints.size(); ++i) {
    EXPECT_GE(r.checkpoints[i].ledger.negative_queries,
              r.checkpoints[i - 1].ledger.negative_queries);
  }
}

TEST(AgnosticThresholds, RealizableTinyEtaIsAccurate) {
  const NoisyThreshold dist(0.3, 0.0);
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto r = audit_thresholds_agnostic(dist, agnostic_params(0.005), rng);
    EXPECT_LE(dist.exact_error(r.hypothesis), 1.5 * 0.005);
  }
}

TEST(AgnosticThresholds, PinnedSeededRun) {
  Rng rng(2024);
  const NoisyThreshold dist(0.4, 0.05);
  const auto r = audit_thresholds_agnostic(dist, agnostic_params(0.05), rng);
  EXPECT_EQ(r.ledger.negative_queries, 8550u);
  EXPECT_EQ(r.ledger.total_queries, 20747u);
  EXPECT_LE(dist.exact_error(r.hypothesis), 1.5 * 0.05 + 0.01);
}

TEST(AgnosticThresholds, Deterministic) {
  Rng a(9);
  Rng b(9);
  const NoisyThreshold dist(0.6, 0.02);
  const auto ra = audit_thresholds_agnostic(dist, agnostic_params(0.02), a);
  const auto rb = audit_thresholds_agnostic(dist, agnostic_params(0.02), b);
  EXPECT_EQ(ra.hypothesis, rb.hypothesis);
  EXPECT_EQ(ra.ledger, rb.ledger);
}

TEST(AgnosticThresholds, RejectsBadParameters) {
  Rng rng(0);
  const NoisyThreshold dist(0.5, 0.1);
  for (auto [eta, alpha, delta] : {std::tuple{0.0, 0.5, 0.2}, std::tuple{0.1, 0.0, 0.2},
                                   std::tuple{0.1, 1.0, 0.2}, std::tuple{0.1, 0.5, 1.0},
                                   std::tuple{0.99, 0.5, 0.2}}) {
    ThresholdAuditParams p;
    p.eta_max = eta;
    p.alpha = alpha;
    p.delta = delta;
    EXPECT_THROW(audit_thresholds_agnostic(dist, p, rng), std::invalid_argument);
  }
  EXPECT_THROW(audit_thresholds_agnostic(NoisyDisjunction({0.5, 0.5}, 0.1),
                                         agnostic_params(0.1), rng),
               std::invalid_argument);
}

}  // namespace
}  // namespace auditing

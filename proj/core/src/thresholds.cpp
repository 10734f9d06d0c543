#include "auditing/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ordering.hpp"

namespace auditing {

namespace {

void require_line_oracle(const AuditOracle& oracle) {
  if (oracle.dim() != 1) {
    throw std::invalid_argument("threshold auditing needs a one-dimensional pool");
  }
}

std::vector<std::size_t> scan_order(const AuditOracle& oracle) {
  return detail::descending_order(oracle.size(),
                                  [&](std::size_t i) { return oracle.coord(i, 0); });
}

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

// Uniform draws of `count` positions out of [0, n).
std::vector<std::size_t> draw_positions(std::size_t n, std::size_t count,
                                        bool with_replacement, Rng& rng) {
  std::vector<std::size_t> out;
  if (with_replacement) {
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(uniform_index(rng, n));
    return out;
  }
  // Partial Fisher-Yates; asking for more than n returns all of them.
  out.resize(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  const std::size_t k = std::min(count, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(out[i], out[i + uniform_index(rng, n - i)]);
  }
  out.resize(k);
  return out;
}

}  // namespace

ThresholdFit threshold_erm(std::span<const double> xs, std::span<const Label> ys,
                           std::span<const std::uint64_t> weights) {
  if (xs.empty()) throw std::invalid_argument("threshold_erm on an empty sample");
  if (ys.size() != xs.size() || (!weights.empty() && weights.size() != xs.size())) {
    throw std::invalid_argument("threshold_erm: mismatched input lengths");
  }
  auto w = [&](std::size_t i) -> std::uint64_t { return weights.empty() ? 1 : weights[i]; };
  const auto order = detail::ascending_order(xs.size(), [&](std::size_t i) { return xs[i]; });

  // Cut 0 labels everything positive: the errors are the negative weight.
  std::uint64_t total = 0;
  std::uint64_t errors = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    total += w(i);
    if (ys[i] == Label::negative) errors += w(i);
  }
  ThresholdFit best{ThresholdHyp{xs[order.front()]}, errors, total};

  // Moving the cut past a group of equal values flips that group to negative.
  std::size_t g = 0;
  while (g < order.size()) {
    const double v = xs[order[g]];
    std::size_t h = g;
    while (h < order.size() && xs[order[h]] == v) {
      const std::size_t i = order[h];
      if (ys[i] == Label::positive) {
        errors += w(i);
      } else {
        errors -= w(i);
      }
      ++h;
    }
    if (errors < best.errors) {
      const double a = h < order.size() ? detail::cut_between(v, xs[order[h]]) : v + 1.0;
      best.hypothesis = ThresholdHyp{a};
      best.errors = errors;
    }
    g = h;
  }
  return best;
}

ThresholdFit threshold_erm(const Pool& sample) {
  if (sample.dim() != 1 && !sample.empty()) {
    throw std::invalid_argument("threshold_erm needs a one-dimensional sample");
  }
  return threshold_erm(sample.coords(), sample.labels());
}

std::uint64_t threshold_class_errors(const Pool& pool) {
  return threshold_erm(pool).errors;
}

ThresholdHyp audit_realizable_threshold(AuditOracle& oracle) {
  require_line_oracle(oracle);
  if (oracle.size() == 0) throw std::invalid_argument("empty pool");
  const auto order = scan_order(oracle);
  for (std::size_t p = 0; p < order.size(); ++p) {
    if (oracle.query(order[p]) == Label::negative) {
      const double neg = oracle.coord(order[p], 0);
      // Every point above the negative was queried positive; cut just below
      // the smallest of them, which is the nearest earlier entry of the scan.
      for (std::size_t q = p; q-- > 0;) {
        const double v = oracle.coord(order[q], 0);
        if (v > neg) return ThresholdHyp{detail::cut_between(neg, v)};
      }
      return ThresholdHyp{neg + 1.0};
    }
  }
  return ThresholdHyp{oracle.coord(order.back(), 0)};
}

ThresholdHyp audit_pool_thresholds_k(AuditOracle& oracle, std::size_t k) {
  require_line_oracle(oracle);
  if (oracle.size() == 0) throw std::invalid_argument("empty pool");
  const auto order = scan_order(oracle);
  std::vector<double> xs;
  std::vector<Label> ys;
  std::size_t negatives = 0;
  for (std::size_t i : order) {
    const Label y = oracle.query(i);
    xs.push_back(oracle.coord(i, 0));
    ys.push_back(y);
    if (y == Label::negative && ++negatives == k + 1) break;
  }
  return threshold_erm(xs, ys).hypothesis;
}

ThresholdAuditResult audit_thresholds_agnostic(const Distribution& dist,
                                               const ThresholdAuditParams& params,
                                               Rng& rng) {
  require_open_unit(params.eta_max, "eta_max");
  require_open_unit(params.alpha, "alpha");
  require_open_unit(params.delta, "delta");
  if (dist.dim() != 1) {
    throw std::invalid_argument("threshold auditing needs a one-dimensional distribution");
  }
  const double nu = params.alpha / 5.0;
  const double eta = params.eta_max;
  const double half_delta = params.delta / 2.0;
  if ((1.0 + nu) * eta > 1.0) {
    throw std::invalid_argument("(1 + alpha/5) eta_max must not exceed 1");
  }

  ThresholdAuditResult result;
  result.nu = nu;

  // Pool S_0 with hidden labels; its points are free to inspect.
  const auto n0 = m_nu(eta, half_delta, 1, nu, params.sizes);
  AuditOracle oracle(dist.draw(n0, rng));
  result.s0_size = n0;
  auto x0 = [&](std::size_t i) { return oracle.coord(i, 0); };

  // S: positions into S_0.
  const auto n_s = m_ag((1.0 + nu) * eta, half_delta, 1, params.sizes);
  const auto s = draw_positions(n0, n_s, params.with_replacement, rng);
  result.s_size = s.size();

  // S_q via representative subset selection; T saturates at 1 above 1/3.
  std::vector<double> s_x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) s_x[i] = x0(s[i]);
  const double subset_eta = std::min(1.0, 2.0 * (1.0 + nu) * eta);
  const auto subset = representative_subset(s_x, subset_eta, half_delta, rng);
  std::vector<std::size_t> sq;
  sq.reserve(subset.selected.size());
  for (std::size_t p : subset.selected) sq.push_back(s[p]);
  result.sq_size = sq.size();

  // Scan S_q from high to low until the negative cap is reached. Duplicate
  // entries count toward the cap but are billed once by the oracle.
  std::sort(sq.begin(), sq.end(), [&](std::size_t a, std::size_t b) {
    return x0(a) > x0(b) || (x0(a) == x0(b) && a < b);
  });
  result.scan_cap =
      ceil_count(12.0 * static_cast<double>(sq.size()) * (1.0 + nu) * eta) + 1;
  std::vector<double> prefix_x;
  std::vector<Label> prefix_y;
  for (std::size_t i : sq) {
    const Label y = oracle.query(i);
    prefix_x.push_back(x0(i));
    prefix_y.push_back(y);
    if (y == Label::negative && ++result.scan_negatives_seen == result.scan_cap) break;
  }
  result.scan_negative_queries = oracle.ledger().negative_queries;
  result.checkpoints.push_back({"scan_sq", oracle.ledger()});

  const ThresholdHyp coarse = threshold_erm(prefix_x, prefix_y).hypothesis;
  result.coarse_hypothesis = coarse;

  // S_1: the closest points of S_0 to the coarse threshold on each side.
  const auto sorted0 = detail::ascending_order(n0, x0);
  const std::size_t per_side = ceil_count(36.0 * (1.0 + nu) * eta * static_cast<double>(n0));
  const auto split = static_cast<std::size_t>(
      std::partition_point(sorted0.begin(), sorted0.end(),
                           [&](std::size_t i) { return x0(i) < coarse.a; }) -
      sorted0.begin());
  const std::size_t lo = split > per_side ? split - per_side : 0;
  const std::size_t hi = std::min(n0, split + per_side);
  std::vector<std::size_t> s1(sorted0.begin() + static_cast<std::ptrdiff_t>(lo),
                              sorted0.begin() + static_cast<std::ptrdiff_t>(hi));
  result.s1_size = s1.size();

  // S_2 drawn from S_1, all labels queried; ERM on the multiset S_2 is a
  // weighted ERM over the distinct members of S_1.
  const auto n2 = m_ag(nu / 72.0, half_delta, 1, params.sizes);
  std::vector<std::uint64_t> counts(s1.size(), 0);
  for (std::size_t p : draw_positions(s1.size(), n2, params.with_replacement, rng)) {
    ++counts[p];
  }
  std::vector<double> fx;
  std::vector<Label> fy;
  std::vector<std::uint64_t> fw;
  std::size_t drawn = 0;
  for (std::size_t p = 0; p < s1.size(); ++p) {
    if (counts[p] == 0) continue;
    fx.push_back(x0(s1[p]));
    fy.push_back(oracle.query(s1[p]));
    fw.push_back(counts[p]);
    drawn += counts[p];
  }
  result.s2_size = drawn;
  result.checkpoints.push_back({"query_s2", oracle.ledger()});

  result.hypothesis = threshold_erm(fx, fy, fw).hypothesis;
  result.ledger = oracle.ledger();
  return result;
}

}  // namespace auditing

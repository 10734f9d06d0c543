#include "auditing/rectangles.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "auditing/metrics.hpp"
#include "ordering.hpp"

namespace auditing {

namespace {

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

std::vector<std::size_t> order_along(const AuditOracle& oracle, std::size_t c) {
  return detail::descending_order(oracle.size(),
                                  [&](std::size_t i) { return oracle.coord(i, c); });
}

}  // namespace

std::vector<double> map_to_orthant(std::span<const double> x) {
  const std::size_t d = x.size();
  std::vector<double> out(2 * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = std::max(x[i], 0.0);
    out[i + d] = std::max(-x[i], 0.0);
  }
  return out;
}

Pool map_to_orthant(const Pool& pool) {
  Pool out(2 * pool.dim());
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.add(map_to_orthant(pool.point(i)), pool.label(i));
  }
  return out;
}

DisjunctionHyp audit_realizable_disjunction(AuditOracle& oracle) {
  if (oracle.size() == 0) throw std::invalid_argument("empty pool");
  const std::size_t d = oracle.dim();
  DisjunctionHyp h;
  h.a.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    const auto order = order_along(oracle, c);
    for (std::size_t p = 0; p < order.size(); ++p) {
      if (oracle.query(order[p]) != Label::negative) continue;
      // Cut just above the negative so it stays inside the box along c.
      const double neg = oracle.coord(order[p], c);
      h.a[c] = neg + 1.0;
      for (std::size_t q = p; q-- > 0;) {
        const double v = oracle.coord(order[q], c);
        if (v > neg) {
          h.a[c] = detail::cut_between(neg, v);
          break;
        }
      }
      break;
    }
  }
  return h;
}

RectangleAuditResult audit_rectangles_agnostic(const Distribution& dist,
                                               const RectangleAuditParams& params,
                                               Rng& rng) {
  require_open_unit(params.eta_min, "eta_min");
  require_open_unit(params.delta, "delta");
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  const std::size_t d = dist.dim();
  if (d == 0) throw std::invalid_argument("distribution has dimension 0");

  RectangleAuditResult result;
  const double nu = params.alpha / 25.0;
  result.nu = nu;
  const double log_inv = std::log2(1.0 / params.eta_min);
  const auto last_round = static_cast<unsigned>(std::floor(log_inv + 1e-9 * std::max(1.0, log_inv)));
  const double divisor = std::max(1.0, std::ceil(log_inv - 1e-9 * std::max(1.0, log_inv)));
  const double round_delta = params.delta / divisor;

  for (unsigned t = 0; t <= last_round; ++t) {
    RoundTrace trace;
    trace.t = t;
    trace.eta_t = std::ldexp(1.0, -static_cast<int>(t));
    const auto n = m_nu(trace.eta_t, round_delta, static_cast<unsigned>(10 * d), nu, params.sizes);
    AuditOracle oracle(dist.draw(n, rng));
    trace.sample_size = n;
    trace.scan_cap =
        ceil_count((1.0 + nu) * trace.eta_t * static_cast<double>(n)) + 1;
    trace.b.assign(d, 0.0);
    trace.direction_negatives.assign(d, 0);
    trace.direction_queries.assign(d, 0);

    for (std::size_t c = 0; c < d; ++c) {
      const auto order = order_along(oracle, c);
      std::uint64_t j = 0;
      std::optional<std::size_t> last;
      bool exhausted = true;
      for (std::size_t i : order) {
        if (j > trace.scan_cap) {
          exhausted = false;
          break;
        }
        if (oracle.revealed(i)) continue;
        last = i;
        ++trace.direction_queries[c];
        if (oracle.query(i) == Label::negative) ++j;
      }
      // The loop also ends when the final unqueried point trips the cap.
      if (j > trace.scan_cap) exhausted = false;
      trace.direction_negatives[c] = j;
      trace.b[c] = (exhausted || !last) ? 0.0 : oracle.coord(*last, c);
    }

    const Pool filled = oracle.revealed_pool(Label::negative);
    const DisjunctionFit fit = disjunction_erm(filled, trace.b, params.search);
    trace.best_err = fit.error_rate();
    const NegativeErrorBound bound = max_err_neg_over_version_space(
        filled, trace.eta_t, nu, trace.b, trace.best_err, params.search);
    trace.eta_hat = bound.value;
    trace.exact_search = fit.exact && bound.exact;
    trace.stopped = trace.eta_hat > trace.eta_t / 4.0;

    result.ledger += oracle.ledger();
    result.hypothesis = fit.hypothesis;
    result.rounds.push_back(std::move(trace));
    if (result.rounds.back().stopped) break;
  }
  return result;
}

std::string round_trace_to_json_line(const RoundTrace& round) {
  nlohmann::ordered_json j;
  j["t"] = round.t;
  j["eta_t"] = round.eta_t;
  j["sample_size"] = round.sample_size;
  j["scan_cap"] = round.scan_cap;
  j["b"] = round.b;
  j["direction_negatives"] = round.direction_negatives;
  j["direction_queries"] = round.direction_queries;
  j["best_err"] = round.best_err;
  j["eta_hat"] = round.eta_hat;
  j["exact_search"] = round.exact_search;
  j["stopped"] = round.stopped;
  return j.dump();
}

std::optional<std::pair<std::size_t, std::size_t>> find_dominance_violation(
    const AuditOracle& oracle, Polarity polarity) {
  // The label that propagates downward: inside the box is negative for h_a
  // and positive for h_a^-.
  const Label inner = polarity == Polarity::outside_positive ? Label::negative : Label::positive;
  std::vector<std::size_t> upper;
  std::vector<std::size_t> lower;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const auto y = oracle.revealed_label(i);
    if (!y) continue;
    (*y == inner ? upper : lower).push_back(i);
  }
  const std::size_t d = oracle.dim();
  for (std::size_t lo : lower) {
    for (std::size_t up : upper) {
      bool dominated = true;
      for (std::size_t c = 0; c < d && dominated; ++c) {
        dominated = oracle.coord(lo, c) <= oracle.coord(up, c);
      }
      if (dominated) return std::make_pair(lo, up);
    }
  }
  return std::nullopt;
}

}  // namespace auditing

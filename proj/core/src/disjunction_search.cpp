// Candidate-grid searches over H_box[b] on a finite labeled sample.
//
// A point x lies inside the box of h_a (predicted negative) iff x[i] < a[i]
// for every i. With per-coordinate candidate lists C_i, a[i] = C_i[k] puts x
// inside along i iff k >= rank_i(x), where rank_i(x) counts the candidates
// <= x[i]. Writing w = +1 for negatives and -1 for positives,
//
//   errors(a)          = N - D(a),   D(a) = sum of w over the box,
//   negative_errors(a) = N - N_box(a),
//
// with N the number of negatives. Both box sums are monotone in every
// coordinate, which is what the sweeps below exploit.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "auditing/metrics.hpp"
#include "auditing/rectangles.hpp"
#include "ordering.hpp"

namespace auditing {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Grid {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::vector<double>> candidates;
  std::vector<std::uint32_t> rank;  // row-major n x d
  std::vector<std::int8_t> weight;  // +1 negative, -1 positive
  std::int64_t negatives = 0;

  std::uint32_t r(std::size_t point, std::size_t c) const { return rank[point * d + c]; }
  std::size_t size(std::size_t c) const { return candidates[c].size(); }

  DisjunctionHyp hypothesis(const std::vector<std::uint32_t>& k) const {
    DisjunctionHyp h;
    h.a.resize(d);
    for (std::size_t c = 0; c < d; ++c) h.a[c] = candidates[c][k[c]];
    return h;
  }
};

Grid build_grid(const Pool& sample, std::span<const double> lower) {
  if (sample.empty()) throw std::invalid_argument("disjunction search on an empty sample");
  if (lower.size() != sample.dim()) {
    throw std::invalid_argument("lower bound dimension does not match the sample");
  }
  if (sample.size() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw std::invalid_argument("sample too large for the grid search");
  }
  Grid g;
  g.n = sample.size();
  g.d = sample.dim();
  g.candidates.resize(g.d);
  g.rank.resize(g.n * g.d);
  std::vector<double> values;
  for (std::size_t c = 0; c < g.d; ++c) {
    values.clear();
    for (std::size_t i = 0; i < g.n; ++i) {
      const double v = sample.coord(i, c);
      if (v >= lower[c]) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    auto& cand = g.candidates[c];
    cand.reserve(values.size() + 1);
    cand.push_back(lower[c]);
    for (std::size_t j = 0; j + 1 < values.size(); ++j) {
      cand.push_back(detail::cut_between(values[j], values[j + 1]));
    }
    if (!values.empty()) cand.push_back(values.back() + 1.0);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double v = sample.coord(i, c);
      g.rank[i * g.d + c] = static_cast<std::uint32_t>(
          std::upper_bound(cand.begin(), cand.end(), v) - cand.begin());
    }
  }
  g.weight.resize(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const bool neg = sample.label(i) == Label::negative;
    g.weight[i] = neg ? 1 : -1;
    g.negatives += neg ? 1 : 0;
  }
  return g;
}

// Range-add on suffixes, global max with leftmost argmax, and leftmost
// position reaching a value. mx[v] holds the subtree max including the adds
// stored at v itself; ancestors' adds are applied on the way down.
class SuffixAddMaxTree {
 public:
  explicit SuffixAddMaxTree(std::size_t n) : n_(n) {
    size_ = 1;
    while (size_ < n) size_ <<= 1;
    mx_.assign(2 * size_, kPad);
    add_.assign(size_, 0);
    for (std::size_t i = 0; i < n; ++i) mx_[size_ + i] = 0;
    for (std::size_t v = size_ - 1; v >= 1; --v) mx_[v] = std::max(mx_[2 * v], mx_[2 * v + 1]);
  }

  void add_suffix(std::size_t l, std::int32_t w) {
    if (l >= n_) return;
    std::size_t lo = l + size_;
    std::size_t hi = n_ + size_;
    const std::size_t lo0 = lo;
    const std::size_t hi0 = hi - 1;
    while (lo < hi) {
      if (lo & 1) apply(lo++, w);
      if (hi & 1) apply(--hi, w);
      lo >>= 1;
      hi >>= 1;
    }
    rebuild(lo0);
    rebuild(hi0);
  }

  std::int32_t max() const { return mx_[1]; }

  std::size_t argmax() const {
    std::size_t v = 1;
    while (v < size_) v = mx_[2 * v] >= mx_[2 * v + 1] ? 2 * v : 2 * v + 1;
    return v - size_;
  }

  std::size_t first_at_least(std::int64_t t) const {
    if (mx_[1] < t) return kNone;
    std::size_t v = 1;
    std::int64_t acc = 0;
    while (v < size_) {
      acc += add_[v];
      v = acc + mx_[2 * v] >= t ? 2 * v : 2 * v + 1;
    }
    return v - size_;
  }

 private:
  static constexpr std::int32_t kPad = std::numeric_limits<std::int32_t>::min() / 2;

  void apply(std::size_t v, std::int32_t w) {
    mx_[v] += w;
    if (v < size_) add_[v] += w;
  }
  void rebuild(std::size_t v) {
    for (v >>= 1; v >= 1; v >>= 1) {
      mx_[v] = std::max(mx_[2 * v], mx_[2 * v + 1]) + add_[v];
    }
  }

  std::size_t n_;
  std::size_t size_;
  std::vector<std::int32_t> mx_;
  std::vector<std::int32_t> add_;
};

// Fenwick tree over suffix increments; value(k) = increments at positions <= k.
class SuffixCounter {
 public:
  explicit SuffixCounter(std::size_t n) : tree_(n + 1, 0) {}
  void add_suffix(std::size_t l, std::int32_t w) {
    for (std::size_t i = l + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += w;
  }
  std::int64_t value(std::size_t k) const {
    std::int64_t s = 0;
    for (std::size_t i = k + 1; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int32_t> tree_;
};

enum class Objective { min_errors, max_negative_errors };

struct SearchState {
  Objective objective = Objective::min_errors;
  std::int64_t threshold = 0;  // max_negative_errors: need D >= threshold
  bool found = false;
  std::int64_t best = 0;  // D for min_errors, N_box for max_negative_errors
  std::vector<std::uint32_t> best_k;
};

// Counting sort of `points` by rank along coordinate c; points whose rank
// exceeds every candidate are dropped (never inside the box along c).
std::vector<std::uint32_t> sort_by_rank(const Grid& g, std::span<const std::uint32_t> points,
                                        std::size_t c, std::vector<std::size_t>& offsets) {
  const std::size_t k = g.size(c);
  offsets.assign(k + 1, 0);
  for (auto p : points) {
    const auto r = g.r(p, c);
    if (r < k) ++offsets[r + 1];
  }
  for (std::size_t j = 0; j < k; ++j) offsets[j + 1] += offsets[j];
  std::vector<std::uint32_t> out(offsets[k]);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (auto p : points) {
    const auto r = g.r(p, c);
    if (r < k) out[cursor[r]++] = p;
  }
  return out;
}

// Sweeps the last two coordinates (or the only one when d == 1) with the
// outer coordinates fixed at `k`; `points` are those inside the box along
// every outer coordinate.
void sweep_inner(const Grid& g, std::span<const std::uint32_t> points,
                 std::vector<std::uint32_t>& k, SearchState& st) {
  const bool one_dim = g.d == 1;
  const std::size_t p = one_dim ? 0 : g.d - 2;
  const std::size_t kp = g.size(p);
  const std::size_t kq = one_dim ? 1 : g.size(g.d - 1);
  auto rq = [&](std::uint32_t pt) -> std::uint32_t { return one_dim ? 0 : g.r(pt, g.d - 1); };

  std::vector<std::size_t> offsets;
  const auto by_p = sort_by_rank(g, points, p, offsets);

  SuffixAddMaxTree tree(kq);
  SuffixCounter neg_box(st.objective == Objective::max_negative_errors ? kq : 0);
  for (std::size_t a = 0; a < kp; ++a) {
    for (std::size_t j = offsets[a]; j < offsets[a + 1]; ++j) {
      const auto pt = by_p[j];
      const auto r = rq(pt);
      if (r >= kq) continue;
      tree.add_suffix(r, g.weight[pt]);
      if (st.objective == Objective::max_negative_errors && g.weight[pt] > 0) {
        neg_box.add_suffix(r, 1);
      }
    }
    if (st.objective == Objective::min_errors) {
      const std::int64_t dmax = tree.max();
      if (!st.found || dmax > st.best) {
        st.found = true;
        st.best = dmax;
        k[p] = static_cast<std::uint32_t>(a);
        if (!one_dim) k[g.d - 1] = static_cast<std::uint32_t>(tree.argmax());
        st.best_k = k;
      }
    } else {
      const std::size_t b = tree.first_at_least(st.threshold);
      if (b == kNone) continue;
      const std::int64_t nbox = neg_box.value(b);
      if (!st.found || nbox < st.best) {
        st.found = true;
        st.best = nbox;
        k[p] = static_cast<std::uint32_t>(a);
        if (!one_dim) k[g.d - 1] = static_cast<std::uint32_t>(b);
        st.best_k = k;
      }
    }
  }
}

void enumerate_outer(const Grid& g, std::span<const std::uint32_t> points, std::size_t c,
                     std::vector<std::uint32_t>& k, SearchState& st) {
  if (g.d <= 2 || c == g.d - 2) {
    sweep_inner(g, points, k, st);
    return;
  }
  std::vector<std::size_t> offsets;
  const auto sorted = sort_by_rank(g, points, c, offsets);
  for (std::size_t a = 0; a < g.size(c); ++a) {
    k[c] = static_cast<std::uint32_t>(a);
    enumerate_outer(g, std::span<const std::uint32_t>(sorted.data(), offsets[a + 1]), c + 1, k,
                    st);
  }
}

void exact_search(const Grid& g, SearchState& st) {
  std::vector<std::uint32_t> all(g.n);
  std::iota(all.begin(), all.end(), 0u);
  std::vector<std::uint32_t> k(g.d, 0);
  enumerate_outer(g, all, 0, k, st);
}

// Coordinate descent: each move re-optimizes one coordinate exactly with
// the others held fixed.
class CoordinateDescent {
 public:
  explicit CoordinateDescent(const Grid& g) : g_(g), inside_(g.n, 0) {}

  void reset(const std::vector<std::uint32_t>& k) {
    k_ = k;
    for (std::size_t i = 0; i < g_.n; ++i) {
      std::uint32_t cnt = 0;
      for (std::size_t c = 0; c < g_.d; ++c) cnt += k_[c] >= g_.r(i, c) ? 1 : 0;
      inside_[i] = cnt;
    }
  }

  const std::vector<std::uint32_t>& k() const { return k_; }

  std::int64_t box_sum(bool negatives_only) const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < g_.n; ++i) {
      if (inside_[i] != g_.d) continue;
      if (negatives_only) {
        s += g_.weight[i] > 0 ? 1 : 0;
      } else {
        s += g_.weight[i];
      }
    }
    return s;
  }

  // Best value for coordinate c; returns false when no value is feasible.
  bool move(std::size_t c, Objective objective, std::int64_t threshold) {
    const std::size_t kc = g_.size(c);
    std::vector<std::int64_t> dsum(kc + 1, 0);
    std::vector<std::int64_t> nsum(kc + 1, 0);
    for (std::size_t i = 0; i < g_.n; ++i) {
      const bool in_c = k_[c] >= g_.r(i, c);
      if (inside_[i] - (in_c ? 1 : 0) != g_.d - 1) continue;
      const auto r = g_.r(i, c);
      if (r >= kc) continue;
      dsum[r] += g_.weight[i];
      nsum[r] += g_.weight[i] > 0 ? 1 : 0;
    }
    std::size_t choice = kNone;
    std::int64_t dacc = 0;
    std::int64_t best = 0;
    for (std::size_t a = 0; a < kc; ++a) {
      dacc += dsum[a];
      if (objective == Objective::min_errors) {
        if (choice == kNone || dacc > best) {
          choice = a;
          best = dacc;
        }
      } else if (dacc >= threshold) {
        choice = a;  // leftmost feasible minimizes the negatives in the box
        break;
      }
    }
    if (choice == kNone) return false;
    set(c, static_cast<std::uint32_t>(choice));
    return true;
  }

 private:
  void set(std::size_t c, std::uint32_t value) {
    if (value == k_[c]) return;
    for (std::size_t i = 0; i < g_.n; ++i) {
      const bool was = k_[c] >= g_.r(i, c);
      const bool now = value >= g_.r(i, c);
      if (was != now) inside_[i] += now ? 1 : -1;
    }
    k_[c] = value;
  }

  const Grid& g_;
  std::vector<std::uint32_t> k_;
  std::vector<std::uint32_t> inside_;
};

std::vector<std::uint32_t> random_start(const Grid& g, Rng& rng) {
  std::vector<std::uint32_t> k(g.d);
  for (std::size_t c = 0; c < g.d; ++c) {
    k[c] = static_cast<std::uint32_t>(uniform_index(rng, g.size(c)));
  }
  return k;
}

// Descends from `start`; returns the final (D or N_box) score, or nothing
// when the start is infeasible for the constrained objective.
std::optional<std::int64_t> descend(CoordinateDescent& cd, const std::vector<std::uint32_t>& start,
                                    Objective objective, std::int64_t threshold) {
  cd.reset(start);
  const bool neg = objective == Objective::max_negative_errors;
  if (neg && cd.box_sum(false) < threshold) return std::nullopt;
  std::int64_t score = cd.box_sum(neg);
  while (true) {
    bool improved = false;
    for (std::size_t c = 0; c < cd.k().size(); ++c) {
      cd.move(c, objective, threshold);
      const std::int64_t s = cd.box_sum(neg);
      if (neg ? s < score : s > score) {
        score = s;
        improved = true;
      }
    }
    if (!improved) return score;
  }
}

void heuristic_search(const Grid& g, SearchState& st, const DisjunctionSearchOptions& options,
                      const std::vector<std::vector<std::uint32_t>>& seeds) {
  Rng rng(options.seed);
  CoordinateDescent cd(g);
  std::vector<std::vector<std::uint32_t>> starts = seeds;
  for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
    starts.push_back(random_start(g, rng));
  }
  for (const auto& start : starts) {
    const auto score = descend(cd, start, st.objective, st.threshold);
    if (!score) continue;
    const bool better = st.objective == Objective::min_errors ? *score > st.best : *score < st.best;
    const bool tie_smaller = *score == st.best && cd.k() < st.best_k;
    if (!st.found || better || tie_smaller) {
      st.found = true;
      st.best = *score;
      st.best_k = cd.k();
    }
  }
}

bool use_exact(const Grid& g, SearchMode mode) {
  switch (mode) {
    case SearchMode::exact: return true;
    case SearchMode::heuristic: return false;
    case SearchMode::automatic: return g.d <= 2 || (g.d == 3 && g.n <= 2000);
  }
  return true;
}

SearchState minimize_errors(const Grid& g, bool exact, const DisjunctionSearchOptions& options) {
  SearchState st;
  st.objective = Objective::min_errors;
  if (exact) {
    exact_search(g, st);
  } else {
    heuristic_search(g, st, options, {std::vector<std::uint32_t>(g.d, 0)});
  }
  return st;
}

}  // namespace

DisjunctionFit disjunction_erm(const Pool& sample, std::span<const double> lower_bound,
                               const DisjunctionSearchOptions& options) {
  const Grid g = build_grid(sample, lower_bound);
  const bool exact = use_exact(g, options.mode);
  const SearchState st = minimize_errors(g, exact, options);
  DisjunctionFit fit;
  fit.hypothesis = g.hypothesis(st.best_k);
  fit.errors = static_cast<std::uint64_t>(g.negatives - st.best);
  fit.size = g.n;
  fit.exact = exact;
  return fit;
}

NegativeErrorBound max_err_neg_over_version_space(const Pool& sample, double eps, double nu,
                                                  std::span<const double> lower_bound,
                                                  double best_err,
                                                  const DisjunctionSearchOptions& options) {
  const Grid g = build_grid(sample, lower_bound);
  const bool exact = use_exact(g, options.mode);
  const long long allowance = v_nu_error_allowance(g.n, best_err, eps, nu);
  if (allowance < 0) {
    throw std::invalid_argument("best_err is not attainable: version space is empty");
  }
  SearchState st;
  st.objective = Objective::max_negative_errors;
  st.threshold = g.negatives - allowance;
  if (exact) {
    exact_search(g, st);
  } else {
    const SearchState erm = minimize_errors(g, false, options);
    heuristic_search(g, st, options, {erm.best_k});
  }
  NegativeErrorBound out;
  out.exact = exact;
  if (!st.found) {
    if (exact) throw std::invalid_argument("best_err is below the class minimum");
    return out;
  }
  out.negative_errors = static_cast<std::uint64_t>(g.negatives - st.best);
  out.value = static_cast<double>(out.negative_errors) / static_cast<double>(g.n);
  out.witness = g.hypothesis(st.best_k);
  return out;
}

}  // namespace auditing

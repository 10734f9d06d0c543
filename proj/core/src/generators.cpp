#include "auditing/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace auditing {

namespace {

void require_noise(double eta) {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 0.5)");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double box_volume(const std::vector<double>& a) {
  double v = 1.0;
  for (double x : a) v *= clamp01(x);
  return v;
}

}  // namespace

NoisyThreshold::NoisyThreshold(double a_star, double eta) : a_star_(a_star), eta_(eta) {
  if (!(a_star >= 0.0 && a_star <= 1.0)) throw std::invalid_argument("a* must lie in [0, 1]");
  require_noise(eta);
}

void NoisyThreshold::sample(std::size_t n, Rng& rng, Pool& out) const {
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform01(rng);
    Label y = x >= a_star_ ? Label::positive : Label::negative;
    if (bernoulli(rng, eta_)) y = flip(y);
    out.add(x, y);
  }
}

double NoisyThreshold::exact_error(const ThresholdHyp& h) const {
  return eta_ + (1.0 - 2.0 * eta_) * std::abs(clamp01(h.a) - a_star_);
}

NoisyDisjunction::NoisyDisjunction(std::vector<double> a_star, double eta)
    : a_star_(std::move(a_star)), eta_(eta) {
  if (a_star_.empty()) throw std::invalid_argument("a* must have at least one coordinate");
  for (double v : a_star_) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("a* must lie in [0, 1]^d");
  }
  require_noise(eta);
}

void NoisyDisjunction::sample(std::size_t n, Rng& rng, Pool& out) const {
  const std::size_t d = a_star_.size();
  const DisjunctionHyp target{a_star_, Polarity::outside_positive};
  std::vector<double> x(d);
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = uniform01(rng);
    Label y = target.predict(x);
    if (bernoulli(rng, eta_)) y = flip(y);
    out.add(x, y);
  }
}

double NoisyDisjunction::positive_rate() const { return 1.0 - box_volume(a_star_); }

double NoisyDisjunction::exact_error(const DisjunctionHyp& h) const {
  if (h.a.size() != a_star_.size()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> both(h.a.size());
  for (std::size_t i = 0; i < both.size(); ++i) both[i] = std::min(clamp01(h.a[i]), a_star_[i]);
  // Outside-positive hypotheses disagree with the target on the symmetric
  // difference of the two boxes; the flipped class on its complement.
  double disagree = box_volume(h.a) + box_volume(a_star_) - 2.0 * box_volume(both);
  if (h.polarity == Polarity::outside_negative) disagree = 1.0 - disagree;
  return eta_ + (1.0 - 2.0 * eta_) * disagree;
}

FiniteSupport::FiniteSupport(Pool support) : support_(std::move(support)) {
  if (support_.empty()) throw std::invalid_argument("finite support must be non-empty");
}

void FiniteSupport::sample(std::size_t n, Rng& rng, Pool& out) const {
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = uniform_index(rng, support_.size());
    out.add(support_.point(j), support_.label(j));
  }
}

FiniteClassTable CirclePool::table() const {
  std::vector<std::vector<int>> rows;
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < labelings.size(); ++k) {
    std::vector<int> row;
    for (Label y : labelings[k]) row.push_back(to_int(y));
    rows.push_back(std::move(row));
    ids.push_back(k == 0 ? "h_all_negative" : "h_pos_" + std::to_string(k - 1));
  }
  return FiniteClassTable(std::move(rows), std::move(ids));
}

Pool CirclePool::labeled(std::size_t labeling) const {
  Pool out = points;
  const auto& ys = labelings.at(labeling);
  for (std::size_t i = 0; i < ys.size(); ++i) out.set_label(i, ys[i]);
  return out;
}

CirclePool circle_pool(std::size_t m) {
  if (m == 0) throw std::invalid_argument("circle pool needs m >= 1");
  CirclePool out;
  out.points = Pool(2);
  for (std::size_t j = 0; j < m; ++j) {
    const double theta =
        static_cast<double>(j + 1) * std::numbers::pi / (2.0 * static_cast<double>(m + 1));
    const double x[2] = {std::cos(theta), std::sin(theta)};
    out.points.add(x, Label::negative);
  }
  out.labelings.emplace_back(m, Label::negative);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Label> ys(m, Label::negative);
    ys[j] = Label::positive;
    out.labelings.push_back(std::move(ys));
  }
  return out;
}

std::optional<DisjunctionHyp> fit_outside_negative(const Pool& labeled) {
  if (labeled.empty()) throw std::invalid_argument("empty pool");
  const std::size_t d = labeled.dim();
  // The smallest box holding every positive excludes the most points:
  // a[i] just above the largest positive coordinate, or 0 with no positives.
  std::vector<std::optional<double>> top(d);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (labeled.label(i) != Label::positive) continue;
    for (std::size_t c = 0; c < d; ++c) {
      const double v = labeled.coord(i, c);
      if (!top[c] || v > *top[c]) top[c] = v;
    }
  }
  DisjunctionHyp h;
  h.polarity = Polarity::outside_negative;
  h.a.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    if (!top[c]) continue;
    // Cut at the smallest coordinate above the positives, if any.
    std::optional<double> next;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      const double v = labeled.coord(i, c);
      if (v > *top[c] && (!next || v < *next)) next = v;
    }
    h.a[c] = next ? *next : *top[c] + 1.0;
  }
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (h.predict(labeled.point(i)) != labeled.label(i)) return std::nullopt;
  }
  return h;
}

std::size_t CirclePairs::points_per_group() const {
  if (!(eps > 0.0 && eps <= 0.25)) throw std::invalid_argument("eps must lie in (0, 1/4]");
  const double k = 1.0 / (4.0 * eps);
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-9 * std::max(1.0, k)) {
    throw std::invalid_argument("1/(4 eps) must be an integer");
  }
  return static_cast<std::size_t>(r);
}

FiniteSupport CirclePairs::distribution() const {
  if (d == 0 || d % 2 != 0) throw std::invalid_argument("circle pairs need an even d");
  const std::size_t k = points_per_group();
  if (!positives.empty() && positives.size() != groups()) {
    throw std::invalid_argument("circle pairs need one positive entry per group");
  }
  Pool support(d);
  std::vector<double> x(d, 0.0);
  for (std::size_t g = 0; g < groups(); ++g) {
    const long long pos = positives.empty() ? -1 : positives[g];
    if (pos < -1 || pos >= static_cast<long long>(k)) {
      throw std::invalid_argument("circle pairs positive index out of range");
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double theta =
          static_cast<double>(j + 1) * std::numbers::pi / (2.0 * static_cast<double>(k + 1));
      std::fill(x.begin(), x.end(), 0.0);
      x[2 * g] = std::cos(theta);
      x[2 * g + 1] = std::sin(theta);
      support.add(x, static_cast<long long>(j) == pos ? Label::positive : Label::negative);
    }
  }
  return FiniteSupport(std::move(support));
}

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::noisy_threshold: return "noisy-threshold";
    case DistributionKind::noisy_disjunction: return "noisy-disjunction";
    case DistributionKind::circle_pool: return "circle-pool";
    case DistributionKind::circle_pairs: return "circle-pairs";
  }
  return "unknown";
}

DistributionKind distribution_kind_from_string(std::string_view name) {
  for (auto k : {DistributionKind::noisy_threshold, DistributionKind::noisy_disjunction,
                 DistributionKind::circle_pool, DistributionKind::circle_pairs}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown distribution kind '" + std::string(name) + "'");
}

void DistributionSpec::validate() const {
  // Constructing the distribution runs every range check.
  (void)make_distribution(*this);
}

std::size_t DistributionSpec::dim() const {
  switch (kind) {
    case DistributionKind::noisy_threshold: return 1;
    case DistributionKind::noisy_disjunction: return a_star.size();
    case DistributionKind::circle_pool: return 2;
    case DistributionKind::circle_pairs: return d;
  }
  return 0;
}

namespace {

FiniteSupport circle_pool_support(const DistributionSpec& spec) {
  const auto pool = circle_pool(spec.m);
  long long pos = spec.positives.empty() ? -1 : spec.positives.front();
  if (spec.positives.size() > 1 || pos < -1 || pos >= static_cast<long long>(spec.m)) {
    throw std::invalid_argument("circle pool takes one positive index in [-1, m)");
  }
  return FiniteSupport(pool.labeled(static_cast<std::size_t>(pos + 1)));
}

}  // namespace

std::unique_ptr<Distribution> make_distribution(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::noisy_threshold:
      if (spec.a_star.size() != 1) throw std::invalid_argument("noisy threshold needs one a*");
      return std::make_unique<NoisyThreshold>(spec.a_star.front(), spec.eta);
    case DistributionKind::noisy_disjunction:
      if (spec.a_star.size() != spec.d) {
        throw std::invalid_argument("noisy disjunction needs a* of length d");
      }
      return std::make_unique<NoisyDisjunction>(spec.a_star, spec.eta);
    case DistributionKind::circle_pool:
      return std::make_unique<FiniteSupport>(circle_pool_support(spec));
    case DistributionKind::circle_pairs:
      return std::make_unique<FiniteSupport>(CirclePairs{spec.d, spec.eps, spec.positives}.distribution());
  }
  throw std::invalid_argument("unknown distribution kind");
}

double exact_error(const DistributionSpec& spec, const ThresholdHyp& h) {
  const auto dist = make_distribution(spec);
  if (auto* t = dynamic_cast<const NoisyThreshold*>(dist.get())) return t->exact_error(h);
  if (auto* f = dynamic_cast<const FiniteSupport*>(dist.get())) {
    if (f->dim() == 1) return f->exact_error(h);
  }
  throw std::invalid_argument("threshold error needs a one-dimensional distribution");
}

double exact_error(const DistributionSpec& spec, const DisjunctionHyp& h) {
  const auto dist = make_distribution(spec);
  if (h.a.size() != dist->dim()) throw std::invalid_argument("dimension mismatch");
  if (auto* t = dynamic_cast<const NoisyDisjunction*>(dist.get())) return t->exact_error(h);
  if (auto* f = dynamic_cast<const FiniteSupport*>(dist.get())) return f->exact_error(h);
  if (auto* t = dynamic_cast<const NoisyThreshold*>(dist.get())) {
    // A one-coordinate disjunction is a threshold.
    const double e = t->exact_error(ThresholdHyp{h.a.front()});
    return h.polarity == Polarity::outside_positive ? e : 1.0 - e;
  }
  throw std::invalid_argument("unsupported distribution");
}

LabeledExample Sampler::next() {
  const Pool one = dist_->draw(1, rng_);
  return one.example(0);
}

Sampler gen_noisy_threshold(double a_star, double eta, std::uint64_t seed) {
  return Sampler(std::make_shared<NoisyThreshold>(a_star, eta), seed);
}

Sampler gen_noisy_disjunction(std::vector<double> a_star, double eta, std::uint64_t seed) {
  return Sampler(std::make_shared<NoisyDisjunction>(std::move(a_star), eta), seed);
}

Sampler gen_circle_pairs(std::size_t d, double eps, std::uint64_t seed,
                         std::vector<long long> positives) {
  return Sampler(
      std::make_shared<FiniteSupport>(CirclePairs{d, eps, std::move(positives)}.distribution()),
      seed);
}

}  // namespace auditing

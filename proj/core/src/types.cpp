#include "auditing/types.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace auditing {

Label label_from_int(int v) {
  if (v == -1) return Label::negative;
  if (v == 1) return Label::positive;
  throw std::invalid_argument("label must be -1 or 1, got " + std::to_string(v));
}

Pool Pool::from_examples(std::span<const LabeledExample> examples) {
  if (examples.empty()) return Pool();
  Pool pool(examples.front().point.dim());
  pool.reserve(examples.size());
  for (const auto& ex : examples) pool.add(ex.point.coords, ex.label);
  return pool;
}

LabeledExample Pool::example(std::size_t i) const {
  auto x = point(i);
  return {Point{{x.begin(), x.end()}}, labels_[i]};
}

void Pool::reserve(std::size_t n) {
  coords_.reserve(n * dim_);
  labels_.reserve(n);
}

void Pool::add(std::span<const double> x, Label y) {
  if (dim_ == 0 && labels_.empty()) dim_ = x.size();
  if (x.size() != dim_) {
    throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                " does not match pool dimension " +
                                std::to_string(dim_));
  }
  coords_.insert(coords_.end(), x.begin(), x.end());
  labels_.push_back(y);
}

Pool Pool::select(std::span<const std::size_t> indices) const {
  Pool out(dim_);
  out.reserve(indices.size());
  for (std::size_t i : indices) out.add(point(i), labels_[i]);
  return out;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

Pool Distribution::draw(std::size_t n, Rng& rng) const {
  Pool out(dim());
  out.reserve(n);
  sample(n, rng, out);
  return out;
}

}  // namespace auditing

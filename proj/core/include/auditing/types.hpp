#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace auditing {

enum class Label : std::int8_t { negative = -1, positive = 1 };

constexpr int to_int(Label y) { return static_cast<int>(y); }

// Throws std::invalid_argument unless v is -1 or +1.
Label label_from_int(int v);

constexpr Label flip(Label y) {
  return y == Label::positive ? Label::negative : Label::positive;
}

struct Point {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
};

struct LabeledExample {
  Point point;
  Label label = Label::negative;
};

// Ordered multiset of labeled points. Coordinates are stored row-major so
// that pools with millions of points stay a single allocation.
class Pool {
 public:
  Pool() = default;
  explicit Pool(std::size_t dim) : dim_(dim) {}

  static Pool from_examples(std::span<const LabeledExample> examples);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double coord(std::size_t i, std::size_t k) const {
    return coords_[i * dim_ + k];
  }
  Label label(std::size_t i) const { return labels_[i]; }
  std::span<const Label> labels() const { return labels_; }
  std::span<const double> coords() const { return coords_; }

  LabeledExample example(std::size_t i) const;

  void reserve(std::size_t n);
  void add(std::span<const double> x, Label y);
  void add(double x, Label y) { add(std::span<const double>(&x, 1), y); }
  void set_label(std::size_t i, Label y) { labels_[i] = y; }

  // Sub-multiset in the given order; indices may repeat.
  Pool select(std::span<const std::size_t> indices) const;

  bool operator==(const Pool&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<Label> labels_;
};

template <class H>
concept Hypothesis = requires(const H& h, std::span<const double> x) {
  { h.predict(x) } -> std::same_as<Label>;
};

struct ConstantHyp {
  Label value = Label::positive;

  Label predict(std::span<const double>) const { return value; }
};

// One generator per trial, threaded explicitly through every sampling call.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits. Defined here rather than via
// std::uniform_real_distribution so streams are identical across standard
// library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Abstract labeled distribution D over R^d x {-1,+1}.
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual std::size_t dim() const = 0;

  // Appends n i.i.d. draws to `out` (which must have matching dimension).
  virtual void sample(std::size_t n, Rng& rng, Pool& out) const = 0;

  Pool draw(std::size_t n, Rng& rng) const;
};

}  // namespace auditing

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace auditing::detail {

// Smallest value strictly above lo that is at most hi, preferring the
// midpoint. Guards against midpoints collapsing onto lo for adjacent doubles.
inline double cut_between(double lo, double hi) {
  const double m = lo + (hi - lo) / 2.0;
  return m > lo ? m : hi;
}

// Positions sorted by key ascending, ties by position.
template <class KeyFn>
std::vector<std::size_t> ascending_order(std::size_t n, KeyFn key) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = key(a);
    const auto kb = key(b);
    return ka < kb || (!(kb < ka) && a < b);
  });
  return order;
}

// Positions sorted by key descending, ties by position ascending.
template <class KeyFn>
std::vector<std::size_t> descending_order(std::size_t n, KeyFn key) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = key(a);
    const auto kb = key(b);
    return kb < ka || (!(ka < kb) && a < b);
  });
  return order;
}

}  // namespace auditing::detail

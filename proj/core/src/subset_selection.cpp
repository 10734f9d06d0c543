#include <cmath>
#include <stdexcept>

#include "auditing/thresholds.hpp"
#include "ordering.hpp"

namespace auditing {

SubsetSelection representative_subset(std::span<const double> xs, double eta_max,
                                      double delta, Rng& rng) {
  if (!(eta_max > 0.0)) throw std::invalid_argument("eta_max must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  if (xs.empty()) throw std::invalid_argument("representative_subset on an empty pool");

  SubsetSelection out;
  // floor with the same residue tolerance as the ceilings elsewhere.
  const double ratio = 1.0 / (3.0 * eta_max);
  out.blocks = std::max<std::size_t>(
      static_cast<std::size_t>(std::floor(ratio + 1e-9 * std::max(1.0, ratio))), 1);
  out.draws_per_block = ceil_count(14.0 * std::log(8.0 / delta));
  out.block_size = xs.size();
  out.sorted_order = detail::ascending_order(xs.size(), [&](std::size_t i) { return xs[i]; });

  out.selected.reserve(out.blocks * out.draws_per_block);
  for (std::size_t t = 0; t < out.blocks; ++t) {
    const auto [begin, end] = out.block_range(t);
    for (std::size_t l = 0; l < out.draws_per_block; ++l) {
      const std::size_t j = begin + uniform_index(rng, end - begin);
      out.selected.push_back(out.u_at(j));
    }
  }
  return out;
}

SubsetSelection representative_subset(const Pool& pool, double eta_max, double delta,
                                      Rng& rng) {
  if (pool.dim() != 1) throw std::invalid_argument("representative_subset needs d = 1");
  return representative_subset(pool.coords(), eta_max, delta, rng);
}

}  // namespace auditing

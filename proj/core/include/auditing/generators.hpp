#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auditing/greedy.hpp"
#include "auditing/rectangles.hpp"
#include "auditing/thresholds.hpp"
#include "auditing/types.hpp"

namespace auditing {

// X uniform on [0, 1]; Y = h_{a*}(X) flipped independently with rate eta.
class NoisyThreshold : public Distribution {
 public:
  // Requires a_star in [0, 1] and eta in [0, 0.5).
  NoisyThreshold(double a_star, double eta);

  std::size_t dim() const override { return 1; }
  void sample(std::size_t n, Rng& rng, Pool& out) const override;

  double a_star() const { return a_star_; }
  double eta() const { return eta_; }
  // err(D, h) in closed form.
  double exact_error(const ThresholdHyp& h) const;

 private:
  double a_star_;
  double eta_;
};

// X uniform on [0, 1]^d; Y = h_{a*}(X) for the outside-positive disjunction,
// flipped independently with rate eta.
class NoisyDisjunction : public Distribution {
 public:
  NoisyDisjunction(std::vector<double> a_star, double eta);

  std::size_t dim() const override { return a_star_.size(); }
  void sample(std::size_t n, Rng& rng, Pool& out) const override;

  const std::vector<double>& a_star() const { return a_star_; }
  double eta() const { return eta_; }
  // P(h_{a*}(X) = +1) before noise: 1 - prod a*[i].
  double positive_rate() const;
  double exact_error(const DisjunctionHyp& h) const;

 private:
  std::vector<double> a_star_;
  double eta_;
};

// Uniform over a fixed labeled support.
class FiniteSupport : public Distribution {
 public:
  explicit FiniteSupport(Pool support);

  std::size_t dim() const override { return support_.dim(); }
  void sample(std::size_t n, Rng& rng, Pool& out) const override;

  const Pool& support() const { return support_; }
  // Exact error of h under the uniform support measure.
  template <Hypothesis H>
  double exact_error(const H& h) const {
    std::size_t e = 0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      if (h.predict(support_.point(i)) != support_.label(i)) ++e;
    }
    return static_cast<double>(e) / static_cast<double>(support_.size());
  }

 private:
  Pool support_;
};

// m distinct points (cos t_j, sin t_j) with t_j = (j+1) pi / (2 (m+1)), and
// the m+1 labelings realizable by outside-negative disjunctions on them:
// all-negative first, then the single-positive labelings in point order.
struct CirclePool {
  Pool points;  // labels all negative
  std::vector<std::vector<Label>> labelings;

  // Rows follow `labelings`: h_all_negative, then h_pos_<j>.
  FiniteClassTable table() const;
  Pool labeled(std::size_t labeling) const;
};

CirclePool circle_pool(std::size_t m);

// Witness of realizability by an outside-negative disjunction (positives
// strictly inside the box), or none when no such hypothesis exists.
std::optional<DisjunctionHyp> fit_outside_negative(const Pool& labeled);

// d/2 coordinate pairs, each holding 1/(4 eps) points on the unit quarter
// circle of that pair. Every support point has mass 8 eps / d. The labeling
// is all-negative except the listed point of each group (-1 for none).
struct CirclePairs {
  std::size_t d = 2;
  double eps = 0.125;
  std::vector<long long> positives;

  std::size_t groups() const { return d / 2; }
  std::size_t points_per_group() const;
  // Throws std::invalid_argument for odd d or non-integral 1/(4 eps).
  FiniteSupport distribution() const;
};

enum class DistributionKind { noisy_threshold, noisy_disjunction, circle_pool, circle_pairs };

std::string to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(std::string_view name);

struct DistributionSpec {
  DistributionKind kind = DistributionKind::noisy_threshold;
  std::vector<double> a_star{0.5};
  double eta = 0.0;
  std::size_t d = 1;
  std::size_t m = 8;     // circle_pool size
  double eps = 0.125;    // circle_pairs resolution
  // circle_pool: the positive point (-1 for all-negative);
  // circle_pairs: one entry per group.
  std::vector<long long> positives;

  void validate() const;
  std::size_t dim() const;
};

std::unique_ptr<Distribution> make_distribution(const DistributionSpec& spec);

// Exact err(D, h) for the described distribution.
double exact_error(const DistributionSpec& spec, const ThresholdHyp& h);
double exact_error(const DistributionSpec& spec, const DisjunctionHyp& h);

// Seeded stream over a distribution; equal seeds give identical streams.
class Sampler {
 public:
  Sampler(std::shared_ptr<const Distribution> dist, std::uint64_t seed)
      : dist_(std::move(dist)), rng_(seed) {}
  LabeledExample next();
  Pool draw(std::size_t n) { return dist_->draw(n, rng_); }
  const Distribution& distribution() const { return *dist_; }

 private:
  std::shared_ptr<const Distribution> dist_;
  Rng rng_;
};

Sampler gen_noisy_threshold(double a_star, double eta, std::uint64_t seed);
Sampler gen_noisy_disjunction(std::vector<double> a_star, double eta, std::uint64_t seed);
Sampler gen_circle_pairs(std::size_t d, double eps, std::uint64_t seed,
                         std::vector<long long> positives = {});

}  // namespace auditing

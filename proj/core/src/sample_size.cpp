#include "auditing/sample_size.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace auditing {

namespace {

void require_unit(double v, const char* name) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
  }
}

void require_config(const SampleSizeConfig& cfg, double delta) {
  if (!(cfg.C > 0.0) || !(cfg.c > 0.0)) {
    throw std::invalid_argument("sample-size constants must be positive");
  }
  if (!(cfg.c / delta > 1.0)) {
    throw std::invalid_argument("ln(c/delta) must be positive");
  }
}

}  // namespace

SampleSizeConfig SampleSizeConfig::from_name(std::string_view name) {
  if (name == "desk") return desk();
  if (name == "theory") return theory();
  throw std::invalid_argument("unknown sample-size preset: " + std::string(name));
}

std::string SampleSizeConfig::name() const {
  switch (preset) {
    case SizePreset::desk: return "desk";
    case SizePreset::theory: return "theory";
    case SizePreset::custom: return "custom";
  }
  return "custom";
}

std::uint64_t ceil_count(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::invalid_argument("sample size is not a finite non-negative number");
  }
  const double tol = 1e-9 * std::max(1.0, x);
  const double r = std::ceil(x - tol);
  if (r >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
    throw std::overflow_error("sample size overflows");
  }
  return static_cast<std::uint64_t>(std::max(r, 0.0));
}

std::uint64_t m_ag(double eps, double delta, unsigned d, const SampleSizeConfig& cfg) {
  require_unit(eps, "eps");
  require_unit(delta, "delta");
  require_config(cfg, delta);
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  return ceil_count(cfg.C * (d + std::log(cfg.c / delta)) / (eps * eps));
}

std::uint64_t m_nu(double eps, double delta, unsigned d, double nu,
                   const SampleSizeConfig& cfg) {
  require_unit(eps, "eps");
  require_unit(delta, "delta");
  require_unit(nu, "nu");
  require_config(cfg, delta);
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (!(cfg.c / (nu * eps) > 1.0)) {
    throw std::invalid_argument("ln(c/(nu eps)) must be positive");
  }
  const double num = d * std::log(cfg.c / (nu * eps)) + std::log(cfg.c / delta);
  return ceil_count(cfg.C * num / (nu * nu * eps));
}

}  // namespace auditing

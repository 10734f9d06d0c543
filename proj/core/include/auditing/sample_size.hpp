#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace auditing {

enum class SizePreset { desk, theory, custom };

// The universal constants C and c of the uniform-convergence sample sizes.
struct SampleSizeConfig {
  double C = 1.0;
  double c = 4.0;
  SizePreset preset = SizePreset::desk;

  // (C, c) = (1, 4): tractable experiments.
  static SampleSizeConfig desk() { return {1.0, 4.0, SizePreset::desk}; }
  // (C, c) = (8, 8): used where the statistical guarantee itself is tested.
  static SampleSizeConfig theory() { return {8.0, 8.0, SizePreset::theory}; }

  static SampleSizeConfig from_name(std::string_view name);
  std::string name() const;
};

// ceil(C (d + ln(c/delta)) / eps^2), for eps, delta in (0, 1].
std::uint64_t m_ag(double eps, double delta, unsigned d, const SampleSizeConfig& cfg);

// ceil(C (d ln(c/(nu eps)) + ln(c/delta)) / (nu^2 eps)), for eps, delta in
// (0, 1], nu in (0, 1], and c / (nu eps) > 1.
std::uint64_t m_nu(double eps, double delta, unsigned d, double nu,
                   const SampleSizeConfig& cfg);

// ceil that ignores floating residue of order 1e-9 relative, so values that
// are integral in exact arithmetic are not bumped up by one.
std::uint64_t ceil_count(double x);

}  // namespace auditing

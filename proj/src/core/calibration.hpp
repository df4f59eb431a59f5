#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace msense {

/// Outcome of one self-check run by `msense validate`.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Single on-bin unit path, rectangular window, no padding: mean peak / mean floor against N_sub*K*gamma_com.
CheckResult check_processing_gain(int n_subcarriers, int n_antennas, int seeds, std::uint64_t root_seed);

/// Fraction of target-less maps with at least one CFAR crossing.
CheckResult check_false_alarm_rate(int n_subcarriers, int n_antennas, double p_fa, int maps, std::uint64_t root_seed);

/// Random off-bin impulsive targets on the configured grid; worst interpolation error in unpadded bins.
CheckResult check_localization(const SimConfig& cfg, int cases, std::uint64_t root_seed);

/// Largest Chebyshev sidelobe of the configured window, densely sampled.
CheckResult check_window_sidelobes(int length, double attenuation_db);

CheckResult check_thermal_operating_point();

std::vector<CheckResult> run_validation(const SimConfig& cfg, bool quick);

}  // namespace msense

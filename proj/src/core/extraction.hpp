#pragma once

#include <vector>

#include "core/periodogram.hpp"

namespace msense {

struct CfarSpec {
  double p_fa = 0.01;
  double kappa = 4.0;
  double sidelobe_attenuation_db = 30.0;
  /// kappa scales the sidelobe power instead of its amplitude.
  bool kappa_on_power = false;
};

/// What a SAP sends to the fusion center for one extracted peak.
struct PeakReport {
  int sap_id = 0;
  double roundtrip_length = 0.0;  // m
  double azimuth = 0.0;           // rad, SAP frame
  double power_dbm = 0.0;         // interpolated echo power referred to the receiver input
  int range_bin = 0;
  int angle_bin = 0;
  double range_bin_frac = 0.0;  // interpolated bin position
  double angle_bin_frac = 0.0;
  double radius_range_bins = 0.0;
  double radius_angle_bins = 0.0;
  double noise_dbm = 0.0;
};

struct PeakContext {
  int sap_id = 0;
  double noise_dbm = 0.0;
  /// Converts |alpha|^2 into received power; the per-subcarrier symbol power times N_sub.
  double tx_power_w = 1.0;
};

struct InterpolatedPeak {
  double delta_range = 0.0;  // bins, within [-0.5, 0.5]
  double delta_angle = 0.0;
  double power = 0.0;  // linear, same units as the periodogram
};

struct ExtractionResult {
  std::vector<PeakReport> peaks;
  double zeta_cfar = 0.0;       // amplitude
  double zeta_effective = 0.0;  // amplitude, frozen after the first peak
};

/// Amplitude threshold sqrt(-P_N ln(1 - (1 - P_FA)^(1/(N_sub K)))).
double cfar_threshold(double noise_floor, double p_fa, int n_subcarriers, int n_antennas);

/// max(zeta_cfar, kappa * max_peak_amplitude * 10^(-attenuation/20)).
double effective_threshold(double zeta_cfar, double max_peak_amplitude, double kappa, double sidelobe_attenuation_db);

/// Per-axis 3-point parabola on dB power. Range-edge bins are not interpolated in range;
/// the angle axis is cyclic.
InterpolatedPeak interpolate_peak(const RMatrix& values, int range_bin, int angle_bin);

/// Binary successive cancellation: take the global maximum, report it, zero an elliptical
/// region sized from the peak's extent, and repeat until no bin exceeds the threshold.
/// `noise_floor` is the expected noise-only bin value of `pg`.
ExtractionResult extract_peaks(const Periodogram& pg, const CfarSpec& spec, double noise_floor,
                               const PeakContext& ctx = {});

}  // namespace msense

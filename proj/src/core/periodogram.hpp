#pragma once

#include "core/ofdm.hpp"
#include "core/types.hpp"
#include "core/window.hpp"

namespace msense {

struct PadSpec {
  int range_factor = 4;
  int angle_factor = 4;
  bool round_to_pow2 = true;
};

/// Maps periodogram bins to round-trip length and azimuth.
struct BinCalibration {
  int n_range_bins = 0;  // N'
  int n_angle_bins = 0;  // K'
  double subcarrier_spacing_hz = 0.0;
  double element_spacing_m = 0.0;
  double carrier_hz = 0.0;

  double range_bin_m() const { return kSpeedOfLight / (n_range_bins * subcarrier_spacing_hz); }
};

struct PhysicalCoord {
  double roundtrip_length = 0.0;  // m; target range is half of it
  double sin_azimuth = 0.0;
  double azimuth = 0.0;  // rad; valid only when visible
  bool visible = true;
};

struct Periodogram {
  RMatrix values;  // N' x K', range rows, angle columns in natural DFT order
  BinCalibration calibration;
  int n_subcarriers = 0;
  int n_antennas = 0;
  WindowSpec window;
  /// Expected bin value of noise-only input per unit CTF-noise variance.
  double noise_floor_factor = 1.0;
  /// Bin value of an on-bin single path per unit |alpha|^2.
  double coherent_factor = 1.0;
  /// Mainlobe half-widths (first null) in padded bins.
  double range_mainlobe_bins = 1.0;
  double angle_mainlobe_bins = 1.0;
};

/// Padded DFT size: factor * n rounded up to the next power of two when requested.
int padded_size(int n, int factor, bool round_to_pow2);

/// P[n',k'] = 1/(N'K') |sum_m sum_i h'[m,i] e^{-j2pi i k'/K'} e^{+j2pi m n'/N'}|^2 over the
/// separably windowed, zero-padded CTF.
Periodogram compute_periodogram(const EstimatedCtf& est, const WindowSpec& window, const PadSpec& pad = {});

/// Fractional bins allowed. Angle bins wrap into [-K'/2, K'/2).
PhysicalCoord bin_to_physical(double range_bin, double angle_bin, const BinCalibration& cal);

/// Inverse of bin_to_physical; the angle bin is returned in [0, K').
std::pair<double, double> physical_to_bin(double roundtrip_length, double azimuth, const BinCalibration& cal);

}  // namespace msense

#pragma once

#include <string>
#include <vector>

namespace msense {

enum class WindowKind { Rectangular, Chebyshev };

struct WindowSpec {
  WindowKind kind = WindowKind::Chebyshev;
  double sidelobe_attenuation_db = 30.0;

  /// Peak sidelobe attenuation actually realized by this window (13.26 dB for rectangular).
  double effective_sidelobe_db() const;
};

/// Window weights plus the gains needed for power bookkeeping after the DFT.
struct WindowWeights {
  std::vector<double> w;
  double coherent_gain = 0.0;  // sum w
  double power_gain = 0.0;     // sum w^2
  double mainlobe_halfwidth_bins = 1.0;  // first null, in unpadded DFT bins
};

/// Dolph-Chebyshev taper with equiripple sidelobes `attenuation_db` below the mainlobe, peak weight 1.
std::vector<double> chebyshev_window(int length, double attenuation_db);

WindowWeights make_window(const WindowSpec& spec, int length);

WindowKind parse_window_kind(const std::string& name);
std::string to_string(WindowKind kind);

}  // namespace msense

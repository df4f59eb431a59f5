#pragma once

#include <vector>

#include "core/scenario.hpp"
#include "core/types.hpp"

namespace msense {

struct LinkBudget {
  double tx_power_dbm = 30.0;
  double tx_gain_dbi = 5.0;
  double rx_gain_dbi = 5.0;
  double noise_figure_db = 8.0;
  double carrier_hz = 26e9;
  double pathloss_exponent = 2.0;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
};

/// One SAP -> scatter point -> SAP propagation path.
struct Path {
  int target_index = 0;
  int point_index = 0;
  double roundtrip_length = 0.0;  // m
  double azimuth = 0.0;           // rad, SAP frame, positive toward the array axis
  double elevation = 0.0;         // rad
  cdouble coefficient{0.0, 0.0};
  bool occluded = false;
};

struct PathSet {
  int sap_id = 0;
  std::vector<Path> paths;

  std::size_t visible_count() const;
};

/// Sampling grid of a channel transfer function.
struct CtfGrid {
  int n_subcarriers = 2984;
  int n_antennas = 8;
  double subcarrier_spacing_hz = 800e6 / 2984.0;
  double element_spacing_m = 0.0;
  double carrier_hz = 26e9;

  double bandwidth() const { return subcarrier_spacing_hz * n_subcarriers; }
};

/// Half-wavelength ULA grid for the given OFDM numerology.
CtfGrid make_grid(int n_subcarriers, int n_antennas, double bandwidth_hz, double carrier_hz);

struct Ctf {
  CtfGrid grid;
  CMatrix h;  // n_subcarriers x n_antennas
};

/// Closed segment vs closed box; direction independent.
bool segment_intersects_aabb(Vec3 a, Vec3 b, const Aabb& box);

/// Patch element power gain (linear) at local azimuth/elevation; zero behind the wall.
double patch_gain(double max_gain_dbi, double azimuth, double elevation);

/// Mono-static radar-equation amplitude for an unoccluded path. Throws ContractViolation on occluded paths.
cdouble path_coefficient(const Path& path, const LinkBudget& lb, double rcs);

/// One path per scatter point of every target. A path is occluded when the SAP-to-point
/// segment crosses the bounding box of any other target; occluded paths carry zero amplitude.
PathSet trace_paths(const Scene& scene, const SapPose& sap, const LinkBudget& lb);

/// h[n,k] = sum_p a_p exp(j2pi(-n df tau_p + d k fc/c sin(theta_p))), tau_p = l_p / c.
Ctf build_ctf(const PathSet& paths, const CtfGrid& grid);

}  // namespace msense

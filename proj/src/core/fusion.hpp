#pragma once

#include <map>
#include <span>
#include <vector>

#include "core/extraction.hpp"
#include "core/scenario.hpp"

namespace msense {

/// Fused target estimate in the global room frame.
struct GlobalDetection {
  Vec2 position;
  double power_dbm = 0.0;
  std::vector<int> sources;  // sorted, unique SAP ids
  int members = 1;
};

struct FusionConfig {
  double merge_eps = 0.375;  // m; twice the range resolution
  bool require_multinode = true;
  Room room;
  double room_margin = 0.5;  // m
};

/// Range resolution c / (2B).
double range_resolution(double bandwidth_hz);

/// Peak position in global 2D. Local frame: y along boresight, x along the array axis.
Vec2 to_global(const PeakReport& peak, const SapPose& pose);

/// Inverse of to_global: (round-trip length, azimuth) of a global point as seen by `pose`.
std::pair<double, double> from_global(Vec2 point, const SapPose& pose);

/// DBSCAN with min_points = 1, i.e. connected components of the eps-neighbourhood graph.
/// Clusters are ordered by their first member index; members ascend.
std::vector<std::vector<std::size_t>> cluster(std::span<const Vec2> points, double eps);

/// Intra-SAP clustering, inter-SAP merging, room filter, then optional multi-node filter.
std::vector<GlobalDetection> fuse(const std::map<int, std::vector<PeakReport>>& per_sap_peaks,
                                  std::span<const SapPose> poses, const FusionConfig& cfg);

}  // namespace msense

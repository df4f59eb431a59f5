#include "core/fusion.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

namespace msense {

double range_resolution(double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw_invalid("bandwidth must be positive");
  return kSpeedOfLight / (2.0 * bandwidth_hz);
}

Vec2 to_global(const PeakReport& peak, const SapPose& pose) {
  const double range = peak.roundtrip_length / 2.0;
  const double lx = range * std::sin(peak.azimuth);
  const double ly = range * std::cos(peak.azimuth);
  return pose.position.xy() + lx * pose.array_axis() + ly * pose.boresight();
}

std::pair<double, double> from_global(Vec2 point, const SapPose& pose) {
  const Vec2 d = point - pose.position.xy();
  const Vec2 axis = pose.array_axis();
  const Vec2 bore = pose.boresight();
  const double lx = d.x * axis.x + d.y * axis.y;
  const double ly = d.x * bore.x + d.y * bore.y;
  return {2.0 * std::hypot(lx, ly), std::atan2(lx, ly)};
}

std::vector<std::vector<std::size_t>> cluster(std::span<const Vec2> points, double eps) {
  if (!(eps > 0.0)) throw_invalid("cluster eps must be positive");
  const std::size_t n = points.size();
  std::vector<std::size_t> label(n, n);
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> frontier;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] != n) continue;
    const std::size_t id = clusters.size();
    clusters.emplace_back();
    label[seed] = id;
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const std::size_t cur = frontier.back();
      frontier.pop_back();
      clusters[id].push_back(cur);
      for (std::size_t j = 0; j < n; ++j) {
        if (label[j] == n && (points[cur] - points[j]).norm() <= eps) {
          label[j] = id;
          frontier.push_back(j);
        }
      }
    }
    std::sort(clusters[id].begin(), clusters[id].end());
  }
  return clusters;
}

namespace {

// Power-weighted centroid of the members; powers add linearly.
std::vector<GlobalDetection> merge(const std::vector<GlobalDetection>& items, double eps) {
  std::vector<Vec2> positions;
  positions.reserve(items.size());
  for (const auto& d : items) positions.push_back(d.position);

  std::vector<GlobalDetection> merged;
  for (const auto& members : cluster(positions, eps)) {
    double wsum = 0.0;
    Vec2 acc;
    std::set<int> sources;
    int count = 0;
    for (std::size_t idx : members) {
      const double w = dbm_to_watts(items[idx].power_dbm);
      wsum += w;
      acc = acc + w * items[idx].position;
      sources.insert(items[idx].sources.begin(), items[idx].sources.end());
      count += items[idx].members;
    }
    GlobalDetection out;
    if (wsum > 0.0) {
      out.position = (1.0 / wsum) * acc;
    } else {
      for (std::size_t idx : members) out.position = out.position + items[idx].position;
      out.position = (1.0 / static_cast<double>(members.size())) * out.position;
    }
    out.power_dbm = watts_to_dbm(wsum);
    out.sources.assign(sources.begin(), sources.end());
    out.members = count;
    merged.push_back(std::move(out));
  }
  return merged;
}

bool canonical_less(const GlobalDetection& a, const GlobalDetection& b) {
  return std::tie(a.position.x, a.position.y, a.power_dbm, a.sources) <
         std::tie(b.position.x, b.position.y, b.power_dbm, b.sources);
}

}  // namespace

std::vector<GlobalDetection> fuse(const std::map<int, std::vector<PeakReport>>& per_sap_peaks,
                                  std::span<const SapPose> poses, const FusionConfig& cfg) {
  if (!(cfg.merge_eps > 0.0)) throw_invalid("merge_eps must be positive");

  std::vector<GlobalDetection> representatives;
  for (const auto& [sap_id, peaks] : per_sap_peaks) {
    const auto pose = std::find_if(poses.begin(), poses.end(), [&](const SapPose& p) { return p.id == sap_id; });
    if (pose == poses.end()) throw_invalid("peaks reported for unknown SAP " + std::to_string(sap_id));
    std::vector<GlobalDetection> local;
    local.reserve(peaks.size());
    for (const PeakReport& peak : peaks) {
      local.push_back({to_global(peak, *pose), peak.power_dbm, {sap_id}, 1});
    }
    // Sorting makes the result independent of report order.
    std::sort(local.begin(), local.end(), canonical_less);
    for (auto& d : merge(local, cfg.merge_eps)) representatives.push_back(std::move(d));
  }
  std::sort(representatives.begin(), representatives.end(), canonical_less);

  std::vector<GlobalDetection> fused;
  for (auto& d : merge(representatives, cfg.merge_eps)) {
    const bool inside = d.position.x >= -cfg.room_margin && d.position.x <= cfg.room.side_x + cfg.room_margin &&
                        d.position.y >= -cfg.room_margin && d.position.y <= cfg.room.side_y + cfg.room_margin;
    if (!inside) continue;
    if (cfg.require_multinode && d.sources.size() < 2) continue;
    fused.push_back(std::move(d));
  }
  return fused;
}

}  // namespace msense

#pragma once

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace msense {

struct Room {
  double side_x = 10.0;
  double side_y = 10.0;
  double height = 3.0;
};

/// Mono-static sensing node mounted on a wall, looking into the room.
struct SapPose {
  int id = 0;
  Vec3 position;
  /// Global azimuth of the boresight, radians counter-clockwise from +x.
  double boresight_azimuth = 0.0;

  Vec2 boresight() const { return {std::cos(boresight_azimuth), std::sin(boresight_azimuth)}; }
  /// Array axis; boresight rotated clockwise by 90 degrees. Positive local angles point this way.
  Vec2 array_axis() const { return {std::sin(boresight_azimuth), -std::cos(boresight_azimuth)}; }
};

struct Target {
  Vec3 center;
  std::vector<Vec3> scatter_points;
  double per_point_rcs = 0.0;  // m^2

  double total_rcs() const { return per_point_rcs * static_cast<double>(scatter_points.size()); }
};

struct TargetModel {
  int points_per_target = 15;
  double total_rcs = 1.0;
  Vec3 scatter_sigma{0.1, 0.03, 0.5};
  double center_height = 1.0;
};

struct Scene {
  Room room;
  std::vector<SapPose> saps;
  std::vector<Target> targets;
  std::uint64_t seed = 0;
};

/// Wall-midpoint poses in the fixed order -x, +x, -y, +y walls. Throws for n outside 1..4.
std::vector<SapPose> place_saps(const Room& room, int n, double mount_height = 1.5);

/// `n_targets` targets with centers uniform over the room footprint and Gaussian scatter points.
std::vector<Target> spawn_targets(const Room& room, int n_targets, std::uint64_t rng_seed,
                                  const TargetModel& model = {});

/// Single-point target with the whole RCS at `center`.
Target impulsive_target(Vec3 center, double rcs = 1.0);

Aabb target_bounding_box(const Target& t);

void validate_room(const Room& room);

}  // namespace msense

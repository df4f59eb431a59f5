#include "core/scenario.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "core/rng.hpp"

namespace msense {

void validate_room(const Room& room) {
  if (!(room.side_x > 0.0 && room.side_y > 0.0 && room.height > 0.0)) {
    throw_invalid("room extents must be positive");
  }
}

std::vector<SapPose> place_saps(const Room& room, int n, double mount_height) {
  validate_room(room);
  if (n < 1 || n > 4) {
    throw_invalid("number of SAPs must be in 1..4, got " + std::to_string(n));
  }
  const double cx = room.side_x / 2.0;
  const double cy = room.side_y / 2.0;
  const std::vector<SapPose> all = {
      {0, {0.0, cy, mount_height}, 0.0},
      {1, {room.side_x, cy, mount_height}, kPi},
      {2, {cx, 0.0, mount_height}, kPi / 2.0},
      {3, {cx, room.side_y, mount_height}, -kPi / 2.0},
  };
  return {all.begin(), all.begin() + n};
}

std::vector<Target> spawn_targets(const Room& room, int n_targets, std::uint64_t rng_seed,
                                  const TargetModel& model) {
  validate_room(room);
  if (n_targets < 1) {
    throw_invalid("at least one target is required");
  }
  if (model.points_per_target < 1) {
    throw_invalid("targets need at least one scatter point");
  }
  Rng rng(rng_seed);
  std::uniform_real_distribution<double> ux(0.0, room.side_x);
  std::uniform_real_distribution<double> uy(0.0, room.side_y);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Target> targets;
  targets.reserve(static_cast<std::size_t>(n_targets));
  for (int t = 0; t < n_targets; ++t) {
    Target target;
    target.center = {ux(rng), uy(rng), model.center_height};
    target.per_point_rcs = model.total_rcs / model.points_per_target;
    target.scatter_points.reserve(static_cast<std::size_t>(model.points_per_target));
    for (int p = 0; p < model.points_per_target; ++p) {
      const double dx = model.scatter_sigma.x * gauss(rng);
      const double dy = model.scatter_sigma.y * gauss(rng);
      const double dz = model.scatter_sigma.z * gauss(rng);
      target.scatter_points.push_back(target.center + Vec3{dx, dy, dz});
    }
    targets.push_back(std::move(target));
  }
  return targets;
}

Target impulsive_target(Vec3 center, double rcs) {
  return Target{center, {center}, rcs};
}

Aabb target_bounding_box(const Target& t) {
  if (t.scatter_points.empty()) {
    throw_invalid("bounding box of a target without scatter points");
  }
  Aabb box{t.scatter_points.front(), t.scatter_points.front()};
  for (const Vec3& p : t.scatter_points) {
    box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
    box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
  }
  return box;
}

}  // namespace msense

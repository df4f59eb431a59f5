#include "core/raytracer.hpp"

#include <algorithm>
#include <limits>

namespace msense {

std::size_t PathSet::visible_count() const {
  return static_cast<std::size_t>(
      std::count_if(paths.begin(), paths.end(), [](const Path& p) { return !p.occluded; }));
}

CtfGrid make_grid(int n_subcarriers, int n_antennas, double bandwidth_hz, double carrier_hz) {
  if (n_subcarriers < 1 || n_antennas < 1) throw_invalid("CTF grid needs at least one subcarrier and antenna");
  if (!(bandwidth_hz > 0.0) || !(carrier_hz > 0.0)) throw_invalid("bandwidth and carrier must be positive");
  CtfGrid g;
  g.n_subcarriers = n_subcarriers;
  g.n_antennas = n_antennas;
  g.subcarrier_spacing_hz = bandwidth_hz / n_subcarriers;
  g.carrier_hz = carrier_hz;
  g.element_spacing_m = kSpeedOfLight / carrier_hz / 2.0;
  return g;
}

bool segment_intersects_aabb(Vec3 a, Vec3 b, const Aabb& box) {
  const double origin[3] = {a.x, a.y, a.z};
  const double dir[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
  const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
  const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] == 0.0) {
      if (origin[i] < lo[i] || origin[i] > hi[i]) return false;
      continue;
    }
    double ta = (lo[i] - origin[i]) / dir[i];
    double tb = (hi[i] - origin[i]) / dir[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

double patch_gain(double max_gain_dbi, double azimuth, double elevation) {
  if (std::abs(azimuth) >= kPi / 2.0 || std::abs(elevation) >= kPi / 2.0) return 0.0;
  const double ca = std::cos(azimuth);
  const double ce = std::cos(elevation);
  return db_to_linear(max_gain_dbi) * ca * ca * ce * ce;
}

cdouble path_coefficient(const Path& path, const LinkBudget& lb, double rcs) {
  if (path.occluded) {
    throw Error(ErrorCode::ContractViolation, "path_coefficient called on an occluded path");
  }
  if (!(path.roundtrip_length > 0.0)) throw_invalid("path length must be positive");
  const double lambda = lb.wavelength();
  const double range = path.roundtrip_length / 2.0;
  const double g = patch_gain(lb.tx_gain_dbi, path.azimuth, path.elevation) *
                   patch_gain(lb.rx_gain_dbi, path.azimuth, path.elevation);
  const double four_pi = 4.0 * kPi;
  const double power = g * lambda * lambda * rcs /
                       (four_pi * four_pi * four_pi * std::pow(range, 2.0 * lb.pathloss_exponent));
  const double tau = path.roundtrip_length / kSpeedOfLight;
  // Reduce the carrier phase in cycles first; f_c * tau is ~1e3 cycles.
  const double cycles = lb.carrier_hz * tau;
  const double phase = -2.0 * kPi * (cycles - std::floor(cycles));
  return std::polar(std::sqrt(power), phase);
}

PathSet trace_paths(const Scene& scene, const SapPose& sap, const LinkBudget& lb) {
  std::vector<Aabb> boxes;
  boxes.reserve(scene.targets.size());
  for (const Target& t : scene.targets) boxes.push_back(target_bounding_box(t));

  const Vec2 bore = sap.boresight();
  const Vec2 axis = sap.array_axis();

  PathSet set;
  set.sap_id = sap.id;
  for (std::size_t ti = 0; ti < scene.targets.size(); ++ti) {
    const Target& target = scene.targets[ti];
    for (std::size_t pi = 0; pi < target.scatter_points.size(); ++pi) {
      const Vec3& p = target.scatter_points[pi];
      const Vec3 d = p - sap.position;
      const double local_x = d.x * axis.x + d.y * axis.y;
      const double local_y = d.x * bore.x + d.y * bore.y;

      Path path;
      path.target_index = static_cast<int>(ti);
      path.point_index = static_cast<int>(pi);
      path.roundtrip_length = 2.0 * d.norm();
      path.azimuth = std::atan2(local_x, local_y);
      path.elevation = std::atan2(d.z, std::hypot(d.x, d.y));
      for (std::size_t oi = 0; oi < boxes.size() && !path.occluded; ++oi) {
        if (oi == ti) continue;
        path.occluded = segment_intersects_aabb(sap.position, p, boxes[oi]);
      }
      if (!path.occluded && path.roundtrip_length > 0.0) {
        path.coefficient = path_coefficient(path, lb, target.per_point_rcs);
      }
      set.paths.push_back(path);
    }
  }
  return set;
}

Ctf build_ctf(const PathSet& paths, const CtfGrid& grid) {
  const auto n_sub = static_cast<std::size_t>(grid.n_subcarriers);
  const auto n_ant = static_cast<std::size_t>(grid.n_antennas);
  Ctf ctf{grid, CMatrix(n_sub, n_ant)};

  std::vector<cdouble> steer(n_ant);
  constexpr std::size_t kReanchor = 128;
  for (const Path& path : paths.paths) {
    if (path.occluded || path.coefficient == cdouble{}) continue;
    const double tau = path.roundtrip_length / kSpeedOfLight;
    const double spatial = grid.element_spacing_m * grid.carrier_hz / kSpeedOfLight * std::sin(path.azimuth);
    for (std::size_t k = 0; k < n_ant; ++k) {
      steer[k] = path.coefficient * std::polar(1.0, 2.0 * kPi * spatial * static_cast<double>(k));
    }
    const double cycles_per_subcarrier = grid.subcarrier_spacing_hz * tau;
    const cdouble step = std::polar(1.0, -2.0 * kPi * cycles_per_subcarrier);
    cdouble rot{1.0, 0.0};
    for (std::size_t n = 0; n < n_sub; ++n) {
      if (n % kReanchor == 0) {
        const double c = cycles_per_subcarrier * static_cast<double>(n);
        rot = std::polar(1.0, -2.0 * kPi * (c - std::floor(c)));
      }
      cdouble* row = &ctf.h(n, 0);
      for (std::size_t k = 0; k < n_ant; ++k) row[k] += rot * steer[k];
      rot *= step;
    }
  }
  return ctf;
}

}  // namespace msense

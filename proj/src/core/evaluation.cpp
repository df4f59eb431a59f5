#include "core/evaluation.hpp"

#include <algorithm>
#include <tuple>

#include "core/extraction.hpp"
#include "core/fusion.hpp"

namespace msense {

MetricCounts& MetricCounts::operator+=(const MetricCounts& o) {
  true_positives += o.true_positives;
  truths += o.truths;
  detections += o.detections;
  occluded_pairs += o.occluded_pairs;
  target_sap_pairs += o.target_sap_pairs;
  drops += o.drops;
  return *this;
}

MetricsReport MetricCounts::report() const {
  MetricsReport r;
  r.n_truth = truths;
  r.n_detected = detections;
  r.n_true_positive = true_positives;
  r.p_det = truths == 0 ? 0.0 : static_cast<double>(true_positives) / truths;
  r.precision = detections == 0 ? 1.0 : static_cast<double>(true_positives) / detections;
  r.f1 = f1_score(r.p_det, r.precision);
  r.p_occ = target_sap_pairs == 0 ? 0.0 : static_cast<double>(occluded_pairs) / target_sap_pairs;
  return r;
}

MatchResult match_detections(std::span<const Vec2> estimates, std::span<const Vec2> truths, double radius) {
  if (!(radius > 0.0)) throw_invalid("matching radius must be positive");
  std::vector<MatchPair> candidates;
  for (std::size_t e = 0; e < estimates.size(); ++e) {
    for (std::size_t t = 0; t < truths.size(); ++t) {
      const double d = (estimates[e] - truths[t]).norm();
      if (d <= radius) candidates.push_back({e, t, d});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
    return std::tie(a.distance, a.estimate, a.truth) < std::tie(b.distance, b.estimate, b.truth);
  });

  MatchResult m;
  m.radius = radius;
  m.n_estimates = estimates.size();
  m.n_truths = truths.size();
  std::vector<bool> est_used(estimates.size(), false);
  std::vector<bool> truth_used(truths.size(), false);
  for (const MatchPair& c : candidates) {
    if (est_used[c.estimate] || truth_used[c.truth]) continue;
    est_used[c.estimate] = true;
    truth_used[c.truth] = true;
    m.pairs.push_back(c);
  }
  for (std::size_t e = 0; e < estimates.size(); ++e) {
    if (!est_used[e]) m.unmatched_estimates.push_back(e);
  }
  for (std::size_t t = 0; t < truths.size(); ++t) {
    if (!truth_used[t]) m.unmatched_truths.push_back(t);
  }
  return m;
}

double f1_score(double p_det, double precision) {
  const double denom = p_det + precision;
  return denom > 0.0 ? 2.0 * p_det * precision / denom : 0.0;
}

MetricsReport detection_metrics(const MatchResult& m) {
  if (m.n_truths == 0) throw_invalid("detection metrics need at least one ground-truth target");
  MetricCounts c;
  c.true_positives = m.pairs.size();
  c.truths = m.n_truths;
  c.detections = m.n_estimates;
  return c.report();
}

OcclusionCount count_occlusions(const Scene& scene, std::span<const PathSet> paths) {
  OcclusionCount out;
  for (const PathSet& set : paths) {
    std::vector<std::size_t> visible(scene.targets.size(), 0);
    std::vector<std::size_t> total(scene.targets.size(), 0);
    for (const Path& p : set.paths) {
      const auto t = static_cast<std::size_t>(p.target_index);
      ++total[t];
      if (!p.occluded) ++visible[t];
    }
    for (std::size_t t = 0; t < scene.targets.size(); ++t) {
      ++out.pairs;
      if (total[t] > 0 && visible[t] == 0) ++out.fully_occluded;
    }
  }
  return out;
}

double occlusion_fraction(const Scene& scene, std::span<const PathSet> paths) {
  return count_occlusions(scene, paths).fraction();
}

ConfidenceInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Vec2 baseline_single_target(const Periodogram& pg, const SapPose& pose) {
  const auto& data = pg.values.data();
  if (data.empty()) throw_invalid("baseline on an empty periodogram");
  const auto flat = static_cast<std::size_t>(std::max_element(data.begin(), data.end()) - data.begin());
  const int cols = static_cast<int>(pg.values.cols());
  const int n0 = static_cast<int>(flat / static_cast<std::size_t>(cols));
  const int k0 = static_cast<int>(flat % static_cast<std::size_t>(cols));
  const InterpolatedPeak ip = interpolate_peak(pg.values, n0, k0);
  const PhysicalCoord coord = bin_to_physical(n0 + ip.delta_range, k0 + ip.delta_angle, pg.calibration);
  PeakReport peak;
  peak.roundtrip_length = coord.roundtrip_length;
  peak.azimuth = coord.azimuth;
  return to_global(peak, pose);
}

}  // namespace msense

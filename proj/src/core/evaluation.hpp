#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/periodogram.hpp"
#include "core/raytracer.hpp"
#include "core/scenario.hpp"

namespace msense {

struct MatchPair {
  std::size_t estimate = 0;
  std::size_t truth = 0;
  double distance = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_estimates;
  std::vector<std::size_t> unmatched_truths;
  double radius = 1.0;
  std::size_t n_estimates = 0;
  std::size_t n_truths = 0;
};

struct MetricsReport {
  double p_det = 0.0;
  double precision = 1.0;
  double f1 = 0.0;
  std::size_t n_truth = 0;           // |O+|
  std::size_t n_detected = 0;        // |O_det+|
  std::size_t n_true_positive = 0;   // |O_true+|
  double p_occ = 0.0;
};

/// Count-pooled totals over many drops.
struct MetricCounts {
  std::size_t true_positives = 0;
  std::size_t truths = 0;
  std::size_t detections = 0;
  std::size_t occluded_pairs = 0;
  std::size_t target_sap_pairs = 0;
  std::size_t drops = 0;

  MetricCounts& operator+=(const MetricCounts& o);
  MetricsReport report() const;
};

struct OcclusionCount {
  std::size_t fully_occluded = 0;
  std::size_t pairs = 0;

  double fraction() const { return pairs == 0 ? 0.0 : static_cast<double>(fully_occluded) / pairs; }
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Greedy one-to-one matching by ascending distance among pairs within `radius`.
MatchResult match_detections(std::span<const Vec2> estimates, std::span<const Vec2> truths, double radius);

/// P_det, precision and F1 of one match. Throws when there is no ground truth.
MetricsReport detection_metrics(const MatchResult& m);

/// (target, SAP) pairs whose every scatter path is occluded.
OcclusionCount count_occlusions(const Scene& scene, std::span<const PathSet> paths);
double occlusion_fraction(const Scene& scene, std::span<const PathSet> paths);

/// F1 from P_det and precision; zero when both vanish.
double f1_score(double p_det, double precision);

/// 95 % Wilson score interval for `successes` out of `trials`.
ConfidenceInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Global maximum of the periodogram, interpolated and mapped to the room frame.
Vec2 baseline_single_target(const Periodogram& pg, const SapPose& pose);

}  // namespace msense

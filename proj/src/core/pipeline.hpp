#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/config.hpp"
#include "core/evaluation.hpp"
#include "core/extraction.hpp"
#include "core/fusion.hpp"
#include "core/ofdm.hpp"
#include "core/periodogram.hpp"

namespace msense {

/// Everything one SAP produced during a drop.
struct SapAcquisition {
  SapPose pose;
  PathSet paths;
  ExtractionResult extraction;
  double noise_floor = 0.0;  // periodogram units
  SnrReport snr;
  std::optional<Periodogram> periodogram;  // kept only on request
};

struct DropDetail {
  std::uint64_t seed = 0;
  Scene scene;
  std::vector<SapAcquisition> saps;
  std::vector<GlobalDetection> fused;
  MatchResult match;
  MetricsReport metrics;
};

struct DropResult {
  std::uint64_t seed = 0;
  std::vector<std::size_t> peaks_per_sap;
  std::size_t fused_count = 0;
  MetricsReport metrics;
  double elapsed_ms = 0.0;
};

/// Seed of drop number `index` under the run's root seed.
std::uint64_t drop_seed(std::uint64_t root_seed, std::uint64_t index);

/// Random target count, targets and the first `n_saps` wall poses for one drop.
Scene build_scene(const SimConfig& cfg, std::uint64_t seed, int n_saps);

/// Trace, synthesize, modulate, add noise, equalize, periodogram and extract for one SAP.
SapAcquisition acquire(const SimConfig& cfg, const Scene& scene, const SapPose& pose, std::uint64_t seed,
                       bool keep_periodogram = false);

/// Fuses the first `n_saps` acquisitions and scores them against the target centers.
struct SubsetOutcome {
  std::vector<GlobalDetection> fused;
  MatchResult match;
  MetricCounts counts;
};
SubsetOutcome evaluate_subset(const SimConfig& cfg, const Scene& scene, std::span<const SapAcquisition> saps,
                              bool require_multinode);

std::vector<Vec2> truth_positions(const Scene& scene);

/// Full pipeline for one drop; deterministic given (cfg, seed).
DropDetail run_drop_detail(const SimConfig& cfg, std::uint64_t seed, bool keep_periodograms = false);
DropResult run_drop(const SimConfig& cfg, std::uint64_t seed);

}  // namespace msense

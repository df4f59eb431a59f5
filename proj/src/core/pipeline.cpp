#include "core/pipeline.hpp"

#include <chrono>
#include <random>

#include "core/rng.hpp"

namespace msense {

std::uint64_t drop_seed(std::uint64_t root_seed, std::uint64_t index) { return child_seed(root_seed, index); }

Scene build_scene(const SimConfig& cfg, std::uint64_t seed, int n_saps) {
  Scene scene;
  scene.room = cfg.room;
  scene.seed = seed;
  scene.saps = place_saps(cfg.room, n_saps, cfg.sap_height);

  Rng count_rng(child_seed(seed, stream::kTargets + 1));
  std::uniform_int_distribution<int> count(cfg.n_targets_min, cfg.n_targets_max);
  const int n_targets = count(count_rng);
  scene.targets = spawn_targets(cfg.room, n_targets, child_seed(seed, stream::kTargets), cfg.target);
  if (cfg.impulsive_targets) {
    for (Target& t : scene.targets) t = impulsive_target(t.center, cfg.target.total_rcs);
  }
  return scene;
}

SapAcquisition acquire(const SimConfig& cfg, const Scene& scene, const SapPose& pose, std::uint64_t seed,
                       bool keep_periodogram) {
  SapAcquisition acq;
  acq.pose = pose;
  acq.paths = trace_paths(scene, pose, cfg.link);

  const CtfGrid grid = cfg.grid();
  const Ctf ctf = build_ctf(acq.paths, grid);
  const double symbol_power = cfg.symbol_power_w();
  const auto sap = static_cast<std::uint64_t>(pose.id);
  const auto symbols = generate_symbols(grid.n_subcarriers, symbol_power, child_seed(seed, stream::kSymbols + sap));

  NoiseSpec noise;
  noise.total_dbm = cfg.noise_dbm();
  noise.n_subcarriers = grid.n_subcarriers;
  const CMatrix received = apply_channel_and_noise(ctf.h, symbols, noise, child_seed(seed, stream::kNoise + sap));
  const EstimatedCtf est = equalize(received, symbols, grid);
  acq.snr = snr_report(ctf, symbol_power, noise);

  Periodogram pg = compute_periodogram(est, cfg.window, cfg.pad);
  // Equalized noise variance per CTF entry is sigma^2 / |x|^2 = P_N / P_tx.
  const double hhat_variance = noise.per_sample_variance() / symbol_power;
  acq.noise_floor = hhat_variance * pg.noise_floor_factor;

  PeakContext ctx;
  ctx.sap_id = pose.id;
  ctx.noise_dbm = noise.total_dbm;
  ctx.tx_power_w = symbol_power * grid.n_subcarriers;
  acq.extraction = extract_peaks(pg, cfg.cfar(), acq.noise_floor, ctx);
  if (keep_periodogram) acq.periodogram = std::move(pg);
  return acq;
}

std::vector<Vec2> truth_positions(const Scene& scene) {
  std::vector<Vec2> out;
  out.reserve(scene.targets.size());
  for (const Target& t : scene.targets) out.push_back(t.center.xy());
  return out;
}

SubsetOutcome evaluate_subset(const SimConfig& cfg, const Scene& scene, std::span<const SapAcquisition> saps,
                              bool require_multinode) {
  std::map<int, std::vector<PeakReport>> peaks;
  std::vector<SapPose> poses;
  std::vector<PathSet> paths;
  for (const SapAcquisition& acq : saps) {
    peaks[acq.pose.id] = acq.extraction.peaks;
    poses.push_back(acq.pose);
    paths.push_back(acq.paths);
  }
  FusionConfig fc;
  fc.merge_eps = cfg.effective_merge_eps();
  fc.require_multinode = require_multinode;
  fc.room = cfg.room;
  fc.room_margin = cfg.room_margin;

  SubsetOutcome out;
  out.fused = fuse(peaks, poses, fc);
  std::vector<Vec2> estimates;
  estimates.reserve(out.fused.size());
  for (const auto& d : out.fused) estimates.push_back(d.position);
  const auto truths = truth_positions(scene);
  out.match = match_detections(estimates, truths, cfg.match_radius);

  const OcclusionCount occ = count_occlusions(scene, paths);
  out.counts.true_positives = out.match.pairs.size();
  out.counts.truths = truths.size();
  out.counts.detections = estimates.size();
  out.counts.occluded_pairs = occ.fully_occluded;
  out.counts.target_sap_pairs = occ.pairs;
  out.counts.drops = 1;
  return out;
}

DropDetail run_drop_detail(const SimConfig& cfg, std::uint64_t seed, bool keep_periodograms) {
  try {
    cfg.validate();
    DropDetail d;
    d.seed = seed;
    d.scene = build_scene(cfg, seed, cfg.n_saps);
    for (const SapPose& pose : d.scene.saps) {
      d.saps.push_back(acquire(cfg, d.scene, pose, seed, keep_periodograms));
    }
    SubsetOutcome sub = evaluate_subset(cfg, d.scene, d.saps, cfg.require_multinode);
    d.fused = std::move(sub.fused);
    d.match = std::move(sub.match);
    d.metrics = sub.counts.report();
    return d;
  } catch (const Error& e) {
    throw Error(e.code(), "drop seed " + std::to_string(seed) + ": " + e.what());
  }
}

DropResult run_drop(const SimConfig& cfg, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const DropDetail d = run_drop_detail(cfg, seed);
  DropResult r;
  r.seed = seed;
  for (const auto& acq : d.saps) r.peaks_per_sap.push_back(acq.extraction.peaks.size());
  r.fused_count = d.fused.size();
  r.metrics = d.metrics;
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace msense

#include "core/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "core/pipeline.hpp"
#include "core/rng.hpp"

namespace msense {

SweepAxis parse_axis(const std::string& name) {
  if (name == "noise_power_dBm" || name == "noise_power_dbm") return SweepAxis::NoisePower;
  if (name == "n_saps") return SweepAxis::NSaps;
  if (name == "n_antennas") return SweepAxis::NAntennas;
  if (name == "bandwidth") return SweepAxis::Bandwidth;
  if (name == "n_targets") return SweepAxis::NTargets;
  if (name == "room_side") return SweepAxis::RoomSide;
  throw_invalid("unknown sweep axis '" + name + "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::NoisePower: return "noise_power_dBm";
    case SweepAxis::NSaps: return "n_saps";
    case SweepAxis::NAntennas: return "n_antennas";
    case SweepAxis::Bandwidth: return "bandwidth";
    case SweepAxis::NTargets: return "n_targets";
    case SweepAxis::RoomSide: return "room_side";
  }
  return "unknown";
}

void SweepSpec::validate() const {
  if (values.empty()) throw_invalid("sweep needs at least one axis value");
  if (drops_per_point < 1) throw_invalid("sweep needs at least one drop per point");
  if (axis != SweepAxis::NSaps) {
    if (sap_counts.empty()) throw_invalid("sweep needs at least one SAP count");
    for (int n : sap_counts) {
      if (n < 1 || n > 4) throw_invalid("SAP counts must lie in 1..4");
    }
  }
  if (filters.empty()) throw_invalid("sweep needs at least one filter setting");
  base.validate();
  for (double v : values) config_for_point(base, axis, v).validate();
}

SimConfig config_for_point(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig c = base;
  auto as_count = [&](const char* what) {
    const double r = std::round(value);
    if (std::abs(r - value) > 1e-9 || r < 1.0) throw_invalid(std::string(what) + " axis values must be positive integers");
    return static_cast<int>(r);
  };
  switch (axis) {
    case SweepAxis::NoisePower:
      c.noise_power_dbm = value;
      break;
    case SweepAxis::NSaps:
      c.n_saps = as_count("n_saps");
      break;
    case SweepAxis::NAntennas:
      c.n_antennas = as_count("n_antennas");
      break;
    case SweepAxis::Bandwidth:
      set_bandwidth_keep_spacing(c, value);
      break;
    case SweepAxis::NTargets:
      c.n_targets_min = c.n_targets_max = as_count("n_targets");
      break;
    case SweepAxis::RoomSide:
      c.room.side_x = c.room.side_y = value;
      break;
  }
  return c;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

SweepRow finish_row(double value, int n_saps, bool filter, const MetricCounts& counts) {
  SweepRow row;
  row.axis_value = value;
  row.n_saps = n_saps;
  row.filter = filter;
  row.counts = counts;
  row.metrics = counts.report();
  row.p_det_ci = wilson_interval(counts.true_positives, counts.truths);
  row.precision_ci = wilson_interval(counts.true_positives, counts.detections);
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const RowSink& sink) {
  spec.validate();
  std::vector<SweepRow> all;
  for (double value : spec.values) {
    SimConfig cfg = config_for_point(spec.base, spec.axis, value);
    const std::vector<int> curves =
        spec.axis == SweepAxis::NSaps ? std::vector<int>{cfg.n_saps} : spec.sap_counts;
    const int max_saps = *std::max_element(curves.begin(), curves.end());
    cfg.n_saps = max_saps;

    const std::size_t cells = curves.size() * spec.filters.size();
    const auto drops = static_cast<std::size_t>(spec.drops_per_point);
    std::vector<std::vector<MetricCounts>> per_drop(drops, std::vector<MetricCounts>(cells));

    parallel_for(drops, cfg.threads, [&](std::size_t i) {
      const std::uint64_t seed = drop_seed(cfg.seed, i);
      try {
        const Scene scene = build_scene(cfg, seed, max_saps);
        std::vector<SapAcquisition> acqs;
        acqs.reserve(scene.saps.size());
        for (const SapPose& pose : scene.saps) acqs.push_back(acquire(cfg, scene, pose, seed));
        std::size_t cell = 0;
        for (int n : curves) {
          for (bool filter : spec.filters) {
            const auto subset = std::span<const SapAcquisition>(acqs).first(static_cast<std::size_t>(n));
            per_drop[i][cell++] = evaluate_subset(cfg, scene, subset, filter).counts;
          }
        }
      } catch (const Error& e) {
        throw Error(e.code(), to_string(spec.axis) + "=" + std::to_string(value) + ", drop seed " +
                                  std::to_string(seed) + ": " + e.what());
      }
    });

    std::vector<SweepRow> rows;
    std::size_t cell = 0;
    for (int n : curves) {
      for (bool filter : spec.filters) {
        MetricCounts total;
        for (const auto& d : per_drop) total += d[cell];
        rows.push_back(finish_row(value, n, filter, total));
        ++cell;
      }
    }
    if (sink) sink(rows);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

std::vector<SweepRow> run_baseline(const SweepSpec& spec, const RowSink& sink) {
  spec.validate();
  std::vector<SweepRow> all;
  for (double value : spec.values) {
    SimConfig cfg = config_for_point(spec.base, spec.axis, value);
    cfg.n_saps = 1;
    cfg.n_targets_min = cfg.n_targets_max = 1;
    cfg.impulsive_targets = true;
    const auto drops = static_cast<std::size_t>(spec.drops_per_point);
    std::vector<MetricCounts> per_drop(drops);

    parallel_for(drops, cfg.threads, [&](std::size_t i) {
      const std::uint64_t seed = drop_seed(cfg.seed, i);
      const Scene scene = build_scene(cfg, seed, 1);
      const SapAcquisition acq = acquire(cfg, scene, scene.saps.front(), seed, /*keep_periodogram=*/true);
      const Vec2 estimate = baseline_single_target(*acq.periodogram, acq.pose);
      const auto truths = truth_positions(scene);
      const MatchResult m = match_detections(std::span(&estimate, 1), truths, cfg.match_radius);
      const PathSet paths[] = {acq.paths};
      const OcclusionCount occ = count_occlusions(scene, paths);
      MetricCounts c;
      c.true_positives = m.pairs.size();
      c.truths = truths.size();
      c.detections = 1;
      c.occluded_pairs = occ.fully_occluded;
      c.target_sap_pairs = occ.pairs;
      c.drops = 1;
      per_drop[i] = c;
    });

    MetricCounts total;
    for (const auto& c : per_drop) total += c;
    std::vector<SweepRow> rows{finish_row(value, 1, false, total)};
    if (sink) sink(rows);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

void write_csv_header(std::ostream& out, SweepAxis axis) {
  out << to_string(axis)
      << ",n_saps,filter,p_det,ci_lo,ci_hi,precision,f1,p_occ,drops,"
         "precision_ci_lo,precision_ci_hi,true_positives,truths,detections\n";
}

void write_csv_rows(std::ostream& out, const std::vector<SweepRow>& rows) {
  char buf[512];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%zu,%.6f,%.6f,%zu,%zu,%zu\n",
                  r.axis_value, r.n_saps, r.filter ? 1 : 0, r.metrics.p_det, r.p_det_ci.lo, r.p_det_ci.hi,
                  r.metrics.precision, r.metrics.f1, r.metrics.p_occ, r.counts.drops, r.precision_ci.lo,
                  r.precision_ci.hi, r.counts.true_positives, r.counts.truths, r.counts.detections);
    out << buf;
  }
  out.flush();
}

nlohmann::json run_manifest(const SweepSpec& spec, const std::string& kind) {
  nlohmann::json j;
  j["kind"] = kind;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["code_version"] = kCodeVersion;
  j["axis"] = to_string(spec.axis);
  j["values"] = spec.values;
  j["drops_per_point"] = spec.drops_per_point;
  j["sap_counts"] = spec.sap_counts;
  std::vector<int> filters;
  for (bool f : spec.filters) filters.push_back(f ? 1 : 0);
  j["filters"] = filters;
  j["seed"] = spec.base.seed;
  j["config"] = to_json(spec.base);
  return j;
}

}  // namespace msense

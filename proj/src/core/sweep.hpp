#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/evaluation.hpp"

namespace msense {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "1.0.0";

enum class SweepAxis { NoisePower, NSaps, NAntennas, Bandwidth, NTargets, RoomSide };

SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::NoisePower;
  std::vector<double> values;
  int drops_per_point = 500;
  SimConfig base;
  std::vector<int> sap_counts = {1, 2, 3, 4};
  std::vector<bool> filters = {false, true};

  void validate() const;
};

/// One aggregated (axis value, SAP count, filter) cell.
struct SweepRow {
  double axis_value = 0.0;
  int n_saps = 1;
  bool filter = false;
  MetricCounts counts;
  MetricsReport metrics;
  ConfidenceInterval p_det_ci;
  ConfidenceInterval precision_ci;
};

using RowSink = std::function<void(const std::vector<SweepRow>& point_rows)>;

/// The configuration used at one sweep point.
SimConfig config_for_point(const SimConfig& base, SweepAxis axis, double value);

/// Every drop simulates the maximum SAP count once and scores each SAP-count prefix
/// with and without the multi-node filter. Drop seeds repeat across axis values.
/// `sink` receives each point's rows as soon as the point completes.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const RowSink& sink = {});

/// Single impulsive target, one SAP, global periodogram maximum as the estimate.
std::vector<SweepRow> run_baseline(const SweepSpec& spec, const RowSink& sink = {});

void write_csv_header(std::ostream& out, SweepAxis axis);
void write_csv_rows(std::ostream& out, const std::vector<SweepRow>& rows);

nlohmann::json run_manifest(const SweepSpec& spec, const std::string& kind);

/// Runs `count` independent jobs on `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job);

}  // namespace msense

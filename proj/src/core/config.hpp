#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/extraction.hpp"
#include "core/periodogram.hpp"
#include "core/raytracer.hpp"
#include "core/scenario.hpp"

namespace msense {

/// Everything needed to run a drop. Serialized as sectioned JSON (see README for the schema).
struct SimConfig {
  Room room;
  int n_saps = 4;
  double sap_height = 1.5;
  int n_targets_min = 1;
  int n_targets_max = 8;
  TargetModel target;
  bool impulsive_targets = false;

  LinkBudget link;
  double bandwidth_hz = 800e6;
  int n_subcarriers = 2984;
  int n_antennas = 8;
  std::optional<double> noise_power_dbm;  // empty: thermal floor of the band plus NF

  WindowSpec window;
  PadSpec pad;
  double p_fa = 0.01;
  double kappa = 4.0;
  bool kappa_on_power = false;

  bool require_multinode = true;
  double room_margin = 0.5;
  std::optional<double> merge_eps;  // empty: twice the range resolution

  double match_radius = 1.0;

  std::uint64_t seed = 1;
  int drops = 500;
  int threads = 0;  // 0: hardware concurrency

  double noise_dbm() const;
  CtfGrid grid() const;
  double symbol_power_w() const;
  double effective_merge_eps() const;
  CfarSpec cfar() const;

  /// Throws InvalidArgument on inconsistent values.
  void validate() const;
};

nlohmann::json to_json(const SimConfig& cfg);
SimConfig config_from_json(const nlohmann::json& j);
SimConfig load_config(const std::string& path);

/// Sets one dotted key ("radio.bandwidth_hz") from text. Numbers, booleans and arrays are
/// parsed as JSON; anything else is taken as a string.
void apply_override(SimConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Changes the bandwidth while keeping the subcarrier spacing.
void set_bandwidth_keep_spacing(SimConfig& cfg, double bandwidth_hz);

}  // namespace msense

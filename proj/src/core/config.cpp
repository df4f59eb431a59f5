#include "core/config.hpp"

#include <cmath>
#include <fstream>

#include "core/fusion.hpp"
#include "core/ofdm.hpp"

namespace msense {

using nlohmann::json;

double SimConfig::noise_dbm() const {
  return noise_power_dbm ? *noise_power_dbm : thermal_noise_dbm(bandwidth_hz, link.noise_figure_db);
}

CtfGrid SimConfig::grid() const { return make_grid(n_subcarriers, n_antennas, bandwidth_hz, link.carrier_hz); }

double SimConfig::symbol_power_w() const { return dbm_to_watts(link.tx_power_dbm) / n_subcarriers; }

double SimConfig::effective_merge_eps() const {
  return merge_eps ? *merge_eps : 2.0 * range_resolution(bandwidth_hz);
}

CfarSpec SimConfig::cfar() const { return {p_fa, kappa, window.effective_sidelobe_db(), kappa_on_power}; }

void SimConfig::validate() const {
  validate_room(room);
  if (n_saps < 1 || n_saps > 4) throw_invalid("scene.n_saps must be in 1..4");
  if (n_targets_min < 1 || n_targets_max < n_targets_min) throw_invalid("scene target count range is invalid");
  if (target.points_per_target < 1) throw_invalid("scene.points_per_target must be >= 1");
  if (!(target.total_rcs > 0.0)) throw_invalid("scene.target_rcs must be positive");
  if (!(bandwidth_hz > 0.0) || !(link.carrier_hz > 0.0)) throw_invalid("radio bandwidth and carrier must be positive");
  if (n_subcarriers < 1 || n_antennas < 1) throw_invalid("radio needs at least one subcarrier and antenna");
  if (!(link.pathloss_exponent > 0.0)) throw_invalid("radio.pathloss_exponent must be positive");
  if (window.kind == WindowKind::Chebyshev && !(window.sidelobe_attenuation_db > 0.0)) {
    throw_invalid("processing.sidelobe_db must be positive");
  }
  if (pad.range_factor < 1 || pad.angle_factor < 1) throw_invalid("padding factors must be >= 1");
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw_invalid("processing.p_fa must lie in (0, 1)");
  if (!(kappa >= 1.0)) throw_invalid("processing.kappa must be >= 1");
  if (merge_eps && !(*merge_eps > 0.0)) throw_invalid("fusion.merge_eps must be positive");
  if (!(match_radius > 0.0)) throw_invalid("evaluation.match_radius must be positive");
  if (drops < 1) throw_invalid("run.drops must be >= 1");
  if (threads < 0) throw_invalid("run.threads must be >= 0");
}

json to_json(const SimConfig& c) {
  json j;
  j["room"] = {{"side_x", c.room.side_x}, {"side_y", c.room.side_y}, {"height", c.room.height}};
  j["scene"] = {
      {"n_saps", c.n_saps},
      {"sap_height", c.sap_height},
      {"n_targets_min", c.n_targets_min},
      {"n_targets_max", c.n_targets_max},
      {"points_per_target", c.target.points_per_target},
      {"target_rcs", c.target.total_rcs},
      {"scatter_sigma", {c.target.scatter_sigma.x, c.target.scatter_sigma.y, c.target.scatter_sigma.z}},
      {"target_height", c.target.center_height},
      {"impulsive_targets", c.impulsive_targets},
  };
  j["radio"] = {
      {"carrier_hz", c.link.carrier_hz},
      {"bandwidth_hz", c.bandwidth_hz},
      {"n_subcarriers", c.n_subcarriers},
      {"n_antennas", c.n_antennas},
      {"tx_power_dbm", c.link.tx_power_dbm},
      {"tx_gain_dbi", c.link.tx_gain_dbi},
      {"rx_gain_dbi", c.link.rx_gain_dbi},
      {"noise_figure_db", c.link.noise_figure_db},
      {"pathloss_exponent", c.link.pathloss_exponent},
  };
  j["radio"]["noise_power_dbm"] = c.noise_power_dbm ? json(*c.noise_power_dbm) : json("thermal");
  j["processing"] = {
      {"window", to_string(c.window.kind)},
      {"sidelobe_db", c.window.sidelobe_attenuation_db},
      {"range_pad", c.pad.range_factor},
      {"angle_pad", c.pad.angle_factor},
      {"pad_pow2", c.pad.round_to_pow2},
      {"p_fa", c.p_fa},
      {"kappa", c.kappa},
      {"kappa_domain", c.kappa_on_power ? "power" : "amplitude"},
  };
  j["fusion"] = {{"require_multinode", c.require_multinode}, {"room_margin", c.room_margin}};
  j["fusion"]["merge_eps"] = c.merge_eps ? json(*c.merge_eps) : json("auto");
  j["evaluation"] = {{"match_radius", c.match_radius}};
  j["run"] = {{"seed", c.seed}, {"drops", c.drops}, {"threads", c.threads}};
  return j;
}

namespace {

// Copies known keys of `section` into `out`, rejecting unknown ones.
class SectionReader {
 public:
  SectionReader(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      section_ = &root.at(name);
      if (!section_->is_object()) throw_invalid(std::string("config section '") + name + "' must be an object");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.push_back(key);
    if (section_ == nullptr || !section_->contains(key)) return;
    try {
      out = section_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw_invalid(std::string("config key ") + name_ + "." + key + ": " + e.what());
    }
  }

  const json* raw(const char* key) {
    seen_.push_back(key);
    if (section_ == nullptr || !section_->contains(key)) return nullptr;
    return &section_->at(key);
  }

  void finish() const {
    if (section_ == nullptr) return;
    for (const auto& [key, _] : section_->items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw_invalid(std::string("unknown config key ") + name_ + "." + key);
      }
    }
  }

 private:
  const char* name_;
  const json* section_ = nullptr;
  std::vector<std::string> seen_;
};

// Either a number or one of the sentinel strings.
std::optional<double> optional_number(const json* v, std::optional<double> current, const char* sentinel,
                                      const char* key) {
  if (v == nullptr) return current;
  if (v->is_number()) return v->get<double>();
  if (v->is_string() && v->get<std::string>() == sentinel) return std::nullopt;
  if (v->is_null()) return std::nullopt;
  throw_invalid(std::string("config key ") + key + " must be a number or \"" + sentinel + "\"");
}

}  // namespace

SimConfig config_from_json(const json& j) {
  if (!j.is_object()) throw_invalid("config must be a JSON object");
  static const std::vector<std::string> sections = {"room",   "scene",      "radio", "processing",
                                                    "fusion", "evaluation", "run"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(sections.begin(), sections.end(), key) == sections.end()) {
      throw_invalid("unknown config section '" + key + "'");
    }
  }

  SimConfig c;
  {
    SectionReader r(j, "room");
    r.read("side_x", c.room.side_x);
    r.read("side_y", c.room.side_y);
    r.read("height", c.room.height);
    r.finish();
  }
  {
    SectionReader r(j, "scene");
    r.read("n_saps", c.n_saps);
    r.read("sap_height", c.sap_height);
    r.read("n_targets_min", c.n_targets_min);
    r.read("n_targets_max", c.n_targets_max);
    r.read("points_per_target", c.target.points_per_target);
    r.read("target_rcs", c.target.total_rcs);
    std::vector<double> sigma = {c.target.scatter_sigma.x, c.target.scatter_sigma.y, c.target.scatter_sigma.z};
    r.read("scatter_sigma", sigma);
    if (sigma.size() != 3) throw_invalid("scene.scatter_sigma needs three entries");
    c.target.scatter_sigma = {sigma[0], sigma[1], sigma[2]};
    r.read("target_height", c.target.center_height);
    r.read("impulsive_targets", c.impulsive_targets);
    r.finish();
  }
  {
    SectionReader r(j, "radio");
    r.read("carrier_hz", c.link.carrier_hz);
    r.read("bandwidth_hz", c.bandwidth_hz);
    r.read("n_subcarriers", c.n_subcarriers);
    r.read("n_antennas", c.n_antennas);
    r.read("tx_power_dbm", c.link.tx_power_dbm);
    r.read("tx_gain_dbi", c.link.tx_gain_dbi);
    r.read("rx_gain_dbi", c.link.rx_gain_dbi);
    r.read("noise_figure_db", c.link.noise_figure_db);
    r.read("pathloss_exponent", c.link.pathloss_exponent);
    c.noise_power_dbm = optional_number(r.raw("noise_power_dbm"), c.noise_power_dbm, "thermal", "radio.noise_power_dbm");
    r.finish();
  }
  {
    SectionReader r(j, "processing");
    std::string window = to_string(c.window.kind);
    r.read("window", window);
    c.window.kind = parse_window_kind(window);
    r.read("sidelobe_db", c.window.sidelobe_attenuation_db);
    r.read("range_pad", c.pad.range_factor);
    r.read("angle_pad", c.pad.angle_factor);
    r.read("pad_pow2", c.pad.round_to_pow2);
    r.read("p_fa", c.p_fa);
    r.read("kappa", c.kappa);
    std::string domain = c.kappa_on_power ? "power" : "amplitude";
    r.read("kappa_domain", domain);
    if (domain != "amplitude" && domain != "power") {
      throw_invalid("processing.kappa_domain must be 'amplitude' or 'power'");
    }
    c.kappa_on_power = domain == "power";
    r.finish();
  }
  {
    SectionReader r(j, "fusion");
    r.read("require_multinode", c.require_multinode);
    r.read("room_margin", c.room_margin);
    c.merge_eps = optional_number(r.raw("merge_eps"), c.merge_eps, "auto", "fusion.merge_eps");
    r.finish();
  }
  {
    SectionReader r(j, "evaluation");
    r.read("match_radius", c.match_radius);
    r.finish();
  }
  {
    SectionReader r(j, "run");
    r.read("seed", c.seed);
    r.read("drops", c.drops);
    r.read("threads", c.threads);
    r.finish();
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw_invalid("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(SimConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size()) {
    throw_invalid("override key must look like section.key, got '" + dotted_key + "'");
  }
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json j = to_json(cfg);
  j[dotted_key.substr(0, dot)][dotted_key.substr(dot + 1)] = parsed;
  cfg = config_from_json(j);
}

void set_bandwidth_keep_spacing(SimConfig& cfg, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw_invalid("bandwidth must be positive");
  const double spacing = cfg.bandwidth_hz / cfg.n_subcarriers;
  cfg.n_subcarriers = std::max(1, static_cast<int>(std::lround(bandwidth_hz / spacing)));
  cfg.bandwidth_hz = bandwidth_hz;
}

}  // namespace msense

#include "core/io.hpp"

#include <bit>
#include <fstream>

namespace msense {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json vec(const Vec2& v) { return json::array({v.x, v.y}); }

}  // namespace

json to_json(const Scene& scene) {
  json j;
  j["seed"] = scene.seed;
  j["room"] = {{"side_x", scene.room.side_x}, {"side_y", scene.room.side_y}, {"height", scene.room.height}};
  j["saps"] = json::array();
  for (const auto& s : scene.saps) {
    j["saps"].push_back({{"id", s.id}, {"position", vec(s.position)}, {"boresight_azimuth", s.boresight_azimuth}});
  }
  j["targets"] = json::array();
  for (const auto& t : scene.targets) {
    json pts = json::array();
    for (const auto& p : t.scatter_points) pts.push_back(vec(p));
    j["targets"].push_back({{"center", vec(t.center)}, {"per_point_rcs", t.per_point_rcs}, {"points", pts}});
  }
  return j;
}

json to_json(const PathSet& paths) {
  json j;
  j["sap_id"] = paths.sap_id;
  j["paths"] = json::array();
  for (const auto& p : paths.paths) {
    j["paths"].push_back({{"target", p.target_index},
                          {"point", p.point_index},
                          {"roundtrip_length", p.roundtrip_length},
                          {"azimuth", p.azimuth},
                          {"elevation", p.elevation},
                          {"coefficient", {p.coefficient.real(), p.coefficient.imag()}},
                          {"occluded", p.occluded}});
  }
  return j;
}

json to_json(const PeakReport& p) {
  return {{"sap_id", p.sap_id},
          {"roundtrip_length", p.roundtrip_length},
          {"azimuth", p.azimuth},
          {"power_dbm", p.power_dbm},
          {"range_bin", p.range_bin},
          {"angle_bin", p.angle_bin},
          {"range_bin_frac", p.range_bin_frac},
          {"angle_bin_frac", p.angle_bin_frac},
          {"radius_range_bins", p.radius_range_bins},
          {"radius_angle_bins", p.radius_angle_bins},
          {"noise_dbm", p.noise_dbm}};
}

PeakReport peak_from_json(const json& j) {
  PeakReport p;
  try {
    p.sap_id = j.at("sap_id").get<int>();
    p.roundtrip_length = j.at("roundtrip_length").get<double>();
    p.azimuth = j.at("azimuth").get<double>();
    p.power_dbm = j.at("power_dbm").get<double>();
    p.range_bin = j.value("range_bin", 0);
    p.angle_bin = j.value("angle_bin", 0);
    p.range_bin_frac = j.value("range_bin_frac", 0.0);
    p.angle_bin_frac = j.value("angle_bin_frac", 0.0);
    p.radius_range_bins = j.value("radius_range_bins", 0.0);
    p.radius_angle_bins = j.value("radius_angle_bins", 0.0);
    p.noise_dbm = j.value("noise_dbm", 0.0);
  } catch (const json::exception& e) {
    throw_invalid(std::string("malformed peak report: ") + e.what());
  }
  if (p.roundtrip_length < 0.0) throw_invalid("peak report with negative round-trip length");
  if (std::abs(p.azimuth) >= kPi / 2.0) throw_invalid("peak report azimuth outside the visible region");
  return p;
}

json to_json(const GlobalDetection& d) {
  return {{"position", vec(d.position)}, {"power_dbm", d.power_dbm}, {"sources", d.sources}, {"members", d.members}};
}

json to_json(const MetricsReport& m) {
  return {{"p_det", m.p_det},
          {"precision", m.precision},
          {"f1", m.f1},
          {"n_truth", m.n_truth},
          {"n_detected", m.n_detected},
          {"n_true_positive", m.n_true_positive},
          {"p_occ", m.p_occ}};
}

json to_json(const DropResult& r) {
  return {{"seed", r.seed},
          {"peaks_per_sap", r.peaks_per_sap},
          {"fused_count", r.fused_count},
          {"metrics", to_json(r.metrics)},
          {"elapsed_ms", r.elapsed_ms}};
}

void write_peaks_jsonl(std::ostream& out, const std::vector<PeakReport>& peaks) {
  for (const auto& p : peaks) out << to_json(p).dump() << '\n';
}

std::vector<PeakReport> read_peaks_jsonl(std::istream& in) {
  std::vector<PeakReport> peaks;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      peaks.push_back(peak_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw_invalid("peak line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw_invalid("peak line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return peaks;
}

std::map<int, std::vector<PeakReport>> group_by_sap(const std::vector<PeakReport>& peaks) {
  std::map<int, std::vector<PeakReport>> out;
  for (const auto& p : peaks) out[p.sap_id].push_back(p);
  return out;
}

json fused_to_json(const std::vector<GlobalDetection>& fused) {
  json arr = json::array();
  for (const auto& d : fused) arr.push_back(to_json(d));
  return arr;
}

void write_periodogram_dump(const std::string& prefix, const Periodogram& pg, double noise_floor, int sap_id) {
  static_assert(std::endian::native == std::endian::little, "dump format is little endian");
  std::ofstream bin(prefix + ".f32", std::ios::binary);
  if (!bin) throw Error(ErrorCode::Io, "cannot write " + prefix + ".f32");
  std::vector<float> row(pg.values.cols());
  for (std::size_t n = 0; n < pg.values.rows(); ++n) {
    for (std::size_t k = 0; k < pg.values.cols(); ++k) row[k] = static_cast<float>(pg.values(n, k));
    bin.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!bin) throw Error(ErrorCode::Io, "short write to " + prefix + ".f32");

  const auto& cal = pg.calibration;
  json h;
  h["format"] = "msense-periodogram";
  h["version"] = 1;
  h["dtype"] = "float32";
  h["byte_order"] = "little";
  h["layout"] = "row-major";
  h["rows"] = pg.values.rows();
  h["cols"] = pg.values.cols();
  h["row_axis"] = "range";
  h["col_axis"] = "angle";
  h["angle_bin_order"] = "dft";  // bin k maps to k for k < K'/2 and to k - K' otherwise
  h["sap_id"] = sap_id;
  h["n_subcarriers"] = pg.n_subcarriers;
  h["n_antennas"] = pg.n_antennas;
  h["calibration"] = {{"subcarrier_spacing_hz", cal.subcarrier_spacing_hz},
                      {"element_spacing_m", cal.element_spacing_m},
                      {"carrier_hz", cal.carrier_hz},
                      {"roundtrip_m_per_range_bin", cal.range_bin_m()},
                      {"sin_azimuth_per_angle_bin", kSpeedOfLight / cal.carrier_hz / cal.element_spacing_m /
                                                        cal.n_angle_bins}};
  h["window"] = {{"kind", to_string(pg.window.kind)}, {"sidelobe_db", pg.window.sidelobe_attenuation_db}};
  h["noise_floor"] = noise_floor;
  std::ofstream meta(prefix + ".json");
  if (!meta) throw Error(ErrorCode::Io, "cannot write " + prefix + ".json");
  meta << h.dump(2) << '\n';
}

PeriodogramDump read_periodogram_dump(const std::string& prefix) {
  PeriodogramDump d;
  std::ifstream meta(prefix + ".json");
  if (!meta) throw Error(ErrorCode::Io, "cannot read " + prefix + ".json");
  d.header = json::parse(meta);
  const auto rows = d.header.at("rows").get<std::size_t>();
  const auto cols = d.header.at("cols").get<std::size_t>();
  d.values.resize(rows * cols);
  std::ifstream bin(prefix + ".f32", std::ios::binary);
  if (!bin) throw Error(ErrorCode::Io, "cannot read " + prefix + ".f32");
  bin.read(reinterpret_cast<char*>(d.values.data()), static_cast<std::streamsize>(d.values.size() * sizeof(float)));
  if (!bin) throw Error(ErrorCode::Io, prefix + ".f32 is shorter than its header says");
  return d;
}

}  // namespace msense

#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/fusion.hpp"
#include "core/periodogram.hpp"
#include "core/pipeline.hpp"

namespace msense {

nlohmann::json to_json(const Scene& scene);
nlohmann::json to_json(const PathSet& paths);
nlohmann::json to_json(const PeakReport& peak);
nlohmann::json to_json(const GlobalDetection& d);
nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const DropResult& r);

PeakReport peak_from_json(const nlohmann::json& j);

/// One JSON object per line.
void write_peaks_jsonl(std::ostream& out, const std::vector<PeakReport>& peaks);
/// Blank lines are skipped; malformed lines throw InvalidArgument with the line number.
std::vector<PeakReport> read_peaks_jsonl(std::istream& in);

/// Groups peaks by their SAP id, the shape fuse() consumes.
std::map<int, std::vector<PeakReport>> group_by_sap(const std::vector<PeakReport>& peaks);

nlohmann::json fused_to_json(const std::vector<GlobalDetection>& fused);

/// Writes `<prefix>.f32` (row-major float32 N' x K', little endian) and `<prefix>.json`.
void write_periodogram_dump(const std::string& prefix, const Periodogram& pg, double noise_floor, int sap_id);

struct PeriodogramDump {
  nlohmann::json header;
  std::vector<float> values;
};
PeriodogramDump read_periodogram_dump(const std::string& prefix);

}  // namespace msense

#include "msense/msense.h"

#include <cstring>
#include <fstream>
#include <string>

#include "core/calibration.hpp"
#include "core/config.hpp"
#include "core/io.hpp"
#include "core/pipeline.hpp"
#include "core/sweep.hpp"

struct msense_config {
  msense::SimConfig cfg;
};

struct msense_drop {
  msense::DropDetail detail;
};

namespace {

thread_local std::string g_last_error;

msense_status to_status(msense::ErrorCode code) {
  switch (code) {
    case msense::ErrorCode::InvalidArgument: return MSENSE_ERR_INVALID_ARGUMENT;
    case msense::ErrorCode::ContractViolation: return MSENSE_ERR_CONTRACT;
    case msense::ErrorCode::Io: return MSENSE_ERR_IO;
    case msense::ErrorCode::Internal: return MSENSE_ERR_INTERNAL;
  }
  return MSENSE_ERR_INTERNAL;
}

template <typename F>
msense_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return MSENSE_OK;
  } catch (const msense::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return MSENSE_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MSENSE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MSENSE_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) msense::throw_invalid(what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::ofstream open_out(const char* path) {
  std::ofstream out(path);
  if (!out) throw msense::Error(msense::ErrorCode::Io, std::string("cannot write ") + path);
  return out;
}

std::vector<msense::PeakReport> all_peaks(const msense::DropDetail& d) {
  std::vector<msense::PeakReport> peaks;
  for (const auto& acq : d.saps) peaks.insert(peaks.end(), acq.extraction.peaks.begin(), acq.extraction.peaks.end());
  return peaks;
}

}  // namespace

extern "C" {

const char* msense_version(void) { return msense::kCodeVersion; }

const char* msense_last_error(void) { return g_last_error.c_str(); }

void msense_string_free(char* s) { delete[] s; }

msense_status msense_config_create(msense_config** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new msense_config{};
  });
}

msense_status msense_config_load(const char* path, msense_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto cfg = msense::load_config(path);
    *out = new msense_config{std::move(cfg)};
  });
}

void msense_config_destroy(msense_config* cfg) { delete cfg; }

msense_status msense_config_set(msense_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr && value != nullptr, "null argument");
    msense::apply_override(cfg->cfg, key, value);
  });
}

msense_status msense_config_to_json(const msense_config* cfg, char** out_json) {
  return guarded([&] {
    require(cfg != nullptr && out_json != nullptr, "null argument");
    *out_json = dup_string(msense::to_json(cfg->cfg).dump(2));
  });
}

msense_status msense_thermal_noise_dbm(double bandwidth_hz, double noise_figure_db, double* out_dbm) {
  return guarded([&] {
    require(out_dbm != nullptr, "null output");
    *out_dbm = msense::thermal_noise_dbm(bandwidth_hz, noise_figure_db);
  });
}

msense_status msense_drop_run(const msense_config* cfg, uint64_t seed, int keep_periodograms, msense_drop** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    auto detail = msense::run_drop_detail(cfg->cfg, seed, keep_periodograms != 0);
    *out = new msense_drop{std::move(detail)};
  });
}

void msense_drop_destroy(msense_drop* drop) { delete drop; }

msense_status msense_drop_metrics(const msense_drop* drop, msense_metrics* out) {
  return guarded([&] {
    require(drop != nullptr && out != nullptr, "null argument");
    const auto& m = drop->detail.metrics;
    *out = {m.p_det, m.precision, m.f1, m.p_occ, m.n_truth, m.n_detected, m.n_true_positive};
  });
}

msense_status msense_drop_counts(const msense_drop* drop, size_t* n_saps, size_t* n_peaks_total, size_t* n_fused) {
  return guarded([&] {
    require(drop != nullptr, "null drop");
    if (n_saps) *n_saps = drop->detail.saps.size();
    if (n_peaks_total) *n_peaks_total = all_peaks(drop->detail).size();
    if (n_fused) *n_fused = drop->detail.fused.size();
  });
}

msense_status msense_drop_to_json(const msense_drop* drop, char** out_json) {
  return guarded([&] {
    require(drop != nullptr && out_json != nullptr, "null argument");
    const auto& d = drop->detail;
    nlohmann::json j;
    j["seed"] = d.seed;
    j["scene"] = msense::to_json(d.scene);
    j["saps"] = nlohmann::json::array();
    for (const auto& acq : d.saps) {
      nlohmann::json s;
      s["id"] = acq.pose.id;
      s["paths"] = msense::to_json(acq.paths)["paths"];
      s["peaks"] = nlohmann::json::array();
      for (const auto& p : acq.extraction.peaks) s["peaks"].push_back(msense::to_json(p));
      s["zeta_cfar"] = acq.extraction.zeta_cfar;
      s["zeta_effective"] = acq.extraction.zeta_effective;
      s["noise_floor"] = acq.noise_floor;
      s["gamma_com"] = acq.snr.gamma_com;
      s["gamma_imag"] = acq.snr.gamma_imag;
      j["saps"].push_back(std::move(s));
    }
    j["fused"] = msense::fused_to_json(d.fused);
    j["metrics"] = msense::to_json(d.metrics);
    *out_json = dup_string(j.dump(2));
  });
}

msense_status msense_drop_write_peaks(const msense_drop* drop, const char* path) {
  return guarded([&] {
    require(drop != nullptr && path != nullptr, "null argument");
    auto out = open_out(path);
    msense::write_peaks_jsonl(out, all_peaks(drop->detail));
  });
}

msense_status msense_drop_write_fused(const msense_drop* drop, const char* path) {
  return guarded([&] {
    require(drop != nullptr && path != nullptr, "null argument");
    auto out = open_out(path);
    out << msense::fused_to_json(drop->detail.fused).dump(2) << '\n';
  });
}

msense_status msense_drop_write_periodogram(const msense_drop* drop, size_t sap_index, const char* prefix) {
  return guarded([&] {
    require(drop != nullptr && prefix != nullptr, "null argument");
    require(sap_index < drop->detail.saps.size(), "SAP index out of range");
    const auto& acq = drop->detail.saps[sap_index];
    if (!acq.periodogram) {
      throw msense::Error(msense::ErrorCode::ContractViolation, "drop was run without keep_periodograms");
    }
    msense::write_periodogram_dump(prefix, *acq.periodogram, acq.noise_floor, acq.pose.id);
  });
}

msense_status msense_fuse_peaks_file(const msense_config* cfg, const char* peaks_path, const char* out_json_path,
                                     size_t* n_fused) {
  return guarded([&] {
    require(cfg != nullptr && peaks_path != nullptr && out_json_path != nullptr, "null argument");
    std::ifstream in(peaks_path);
    if (!in) throw msense::Error(msense::ErrorCode::Io, std::string("cannot read ") + peaks_path);
    const auto grouped = msense::group_by_sap(msense::read_peaks_jsonl(in));
    const auto poses = msense::place_saps(cfg->cfg.room, 4, cfg->cfg.sap_height);
    msense::FusionConfig fc;
    fc.merge_eps = cfg->cfg.effective_merge_eps();
    fc.require_multinode = cfg->cfg.require_multinode;
    fc.room = cfg->cfg.room;
    fc.room_margin = cfg->cfg.room_margin;
    const auto fused = msense::fuse(grouped, poses, fc);
    auto out = open_out(out_json_path);
    out << msense::fused_to_json(fused).dump(2) << '\n';
    if (n_fused) *n_fused = fused.size();
  });
}

msense_status msense_sweep_run(const msense_config* cfg, const msense_sweep_options* options, const char* csv_path,
                               const char* manifest_path, msense_progress_fn progress, void* user) {
  return guarded([&] {
    require(cfg != nullptr && options != nullptr && csv_path != nullptr, "null argument");
    require(options->axis != nullptr, "sweep axis missing");
    require(options->values != nullptr || options->n_values == 0, "null values");
    msense::SweepSpec spec;
    spec.axis = msense::parse_axis(options->axis);
    spec.values.assign(options->values, options->values + options->n_values);
    spec.drops_per_point = options->drops_per_point > 0 ? options->drops_per_point : cfg->cfg.drops;
    spec.base = cfg->cfg;
    if (options->sap_counts != nullptr && options->n_sap_counts > 0) {
      spec.sap_counts.assign(options->sap_counts, options->sap_counts + options->n_sap_counts);
    }
    const int mask = options->filters == 0 ? (MSENSE_FILTER_OFF | MSENSE_FILTER_ON) : options->filters;
    spec.filters.clear();
    if (mask & MSENSE_FILTER_OFF) spec.filters.push_back(false);
    if (mask & MSENSE_FILTER_ON) spec.filters.push_back(true);
    if (options->baseline) {
      spec.sap_counts = {1};
      spec.filters = {false};
    }
    spec.validate();

    auto csv = open_out(csv_path);
    msense::write_csv_header(csv, spec.axis);
    if (manifest_path != nullptr) {
      auto manifest = open_out(manifest_path);
      manifest << msense::run_manifest(spec, options->baseline ? "baseline" : "sweep").dump(2) << '\n';
    }
    std::size_t point = 0;
    const std::size_t n_points = spec.values.size();
    auto sink = [&](const std::vector<msense::SweepRow>& rows) {
      msense::write_csv_rows(csv, rows);
      if (progress) progress(rows.front().axis_value, point, n_points, user);
      ++point;
    };
    if (options->baseline) {
      msense::run_baseline(spec, sink);
    } else {
      msense::run_sweep(spec, sink);
    }
  });
}

msense_status msense_validate(const msense_config* cfg, int quick, char** out_report_json, int* all_passed) {
  return guarded([&] {
    require(cfg != nullptr, "null config");
    const auto checks = msense::run_validation(cfg->cfg, quick != 0);
    bool ok = true;
    nlohmann::json report = nlohmann::json::array();
    for (const auto& c : checks) {
      ok = ok && c.passed;
      report.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"measured", c.measured},
                        {"expected", c.expected},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
    }
    if (out_report_json) *out_report_json = dup_string(report.dump(2));
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"

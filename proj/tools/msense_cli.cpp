// msense command line front end. Talks to the simulator only through the C API.
#include <msense/msense.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(msense_status status, const std::string& what) {
  if (status != MSENSE_OK) throw CliError(what + ": " + msense_last_error());
}

struct ConfigDeleter {
  void operator()(msense_config* c) const { msense_config_destroy(c); }
};
struct DropDeleter {
  void operator()(msense_drop* d) const { msense_drop_destroy(d); }
};
using ConfigPtr = std::unique_ptr<msense_config, ConfigDeleter>;
using DropPtr = std::unique_ptr<msense_drop, DropDeleter>;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  std::string out;
  int threads = -1;
};

ConfigPtr make_config(const CommonOptions& o) {
  msense_config* raw = nullptr;
  if (o.config_path.empty()) {
    check(msense_config_create(&raw), "creating config");
  } else {
    check(msense_config_load(o.config_path.c_str(), &raw), "loading " + o.config_path);
  }
  ConfigPtr cfg(raw);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CliError("--set expects section.key=value, got '" + kv + "'");
    check(msense_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
  }
  check(msense_config_set(cfg.get(), "run.seed", std::to_string(o.seed).c_str()), "--seed");
  if (o.threads >= 0) check(msense_config_set(cfg.get(), "run.threads", std::to_string(o.threads).c_str()), "--threads");
  return cfg;
}

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("-c,--config", o.config_path, "JSON config file (defaults are used when omitted)")->check(CLI::ExistingFile);
  sub->add_option("--set", o.overrides, "Override a config key, e.g. --set radio.bandwidth_hz=100e6");
  sub->add_option("--seed", o.seed, "Root seed")->required();
  sub->add_option("-o,--out", o.out, "Output directory")->required();
  sub->add_option("--threads", o.threads, "Worker threads (0: all cores)");
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::vector<double> parse_values(const std::string& list, const std::string& range) {
  std::vector<double> values;
  if (!range.empty()) {
    double start = 0.0, stop = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(range);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step == 0.0) {
      throw CliError("--range expects start:stop:step");
    }
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) values.push_back(start + static_cast<double>(i) * step);
  }
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CliError("bad value '" + item + "' in --values");
    }
  }
  if (values.empty()) throw CliError("give the sweep points with --values or --range");
  return values;
}

void progress_line(double value, size_t index, size_t total, void*) {
  std::fprintf(stderr, "  point %zu/%zu (%g) done\n", index + 1, total, value);
}

int cmd_run(const CommonOptions& o, bool dump_periodograms) {
  auto cfg = make_config(o);
  fs::create_directories(o.out);
  msense_drop* raw = nullptr;
  check(msense_drop_run(cfg.get(), o.seed, dump_periodograms ? 1 : 0, &raw), "running drop");
  DropPtr drop(raw);

  char* json = nullptr;
  check(msense_drop_to_json(drop.get(), &json), "serializing drop");
  {
    std::FILE* f = std::fopen(join_path(o.out, "drop.json").c_str(), "w");
    if (f == nullptr) {
      msense_string_free(json);
      throw CliError("cannot write drop.json");
    }
    std::fputs(json, f);
    std::fclose(f);
  }
  msense_string_free(json);
  check(msense_drop_write_peaks(drop.get(), join_path(o.out, "peaks.jsonl").c_str()), "writing peaks");
  check(msense_drop_write_fused(drop.get(), join_path(o.out, "fused.json").c_str()), "writing fused estimates");

  size_t n_saps = 0, n_peaks = 0, n_fused = 0;
  check(msense_drop_counts(drop.get(), &n_saps, &n_peaks, &n_fused), "reading counts");
  if (dump_periodograms) {
    for (size_t s = 0; s < n_saps; ++s) {
      const auto prefix = join_path(o.out, "periodogram_sap" + std::to_string(s));
      check(msense_drop_write_periodogram(drop.get(), s, prefix.c_str()), "writing periodogram");
    }
  }
  msense_metrics m{};
  check(msense_drop_metrics(drop.get(), &m), "reading metrics");
  std::printf("seed %llu: %zu SAPs, %zu peaks, %zu fused | P_det %.3f precision %.3f F1 %.3f (%zu/%zu targets)\n",
              static_cast<unsigned long long>(o.seed), n_saps, n_peaks, n_fused, m.p_det, m.precision, m.f1,
              m.n_true_positive, m.n_truth);
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& axis, const std::string& values, const std::string& range,
              int drops, const std::vector<int>& saps, const std::string& filter, bool baseline) {
  auto cfg = make_config(o);
  fs::create_directories(o.out);
  const auto points = parse_values(values, range);
  msense_sweep_options opts{};
  opts.axis = axis.c_str();
  opts.values = points.data();
  opts.n_values = points.size();
  opts.drops_per_point = drops;
  opts.sap_counts = saps.empty() ? nullptr : saps.data();
  opts.n_sap_counts = saps.size();
  opts.filters = filter == "on" ? MSENSE_FILTER_ON : filter == "off" ? MSENSE_FILTER_OFF : 0;
  opts.baseline = baseline ? 1 : 0;
  const std::string stem = baseline ? "baseline" : "sweep";
  const auto csv = join_path(o.out, stem + ".csv");
  const auto manifest = join_path(o.out, stem + "_manifest.json");
  std::fprintf(stderr, "%s over %s: %zu points x %d drops\n", stem.c_str(), axis.c_str(), points.size(), drops);
  check(msense_sweep_run(cfg.get(), &opts, csv.c_str(), manifest.c_str(), progress_line, nullptr), stem);
  std::printf("wrote %s\n", csv.c_str());
  return 0;
}

int cmd_validate(const CommonOptions& o, bool quick) {
  auto cfg = make_config(o);
  fs::create_directories(o.out);
  char* report = nullptr;
  int ok = 0;
  check(msense_validate(cfg.get(), quick ? 1 : 0, &report, &ok), "validation");
  const std::string text = report;
  msense_string_free(report);
  if (std::FILE* f = std::fopen(join_path(o.out, "validation.json").c_str(), "w")) {
    std::fputs(text.c_str(), f);
    std::fclose(f);
  }
  std::cout << text << '\n' << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? 0 : 1;
}

int cmd_fuse(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& peaks,
             const std::string& out) {
  CommonOptions o;
  o.config_path = config_path;
  o.overrides = overrides;
  auto cfg = make_config(o);
  size_t n = 0;
  check(msense_fuse_peaks_file(cfg.get(), peaks.c_str(), out.c_str(), &n), "fusing " + peaks);
  std::printf("%zu fused estimates written to %s\n", n, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msense: multi-static OFDM radar sensing simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", msense_version());

  CommonOptions run_opts;
  bool dump = false;
  auto* run = app.add_subcommand("run", "Simulate one drop and write scene, peaks, fused estimates");
  add_common(run, run_opts);
  run->add_flag("--dump-periodograms", dump, "Also write each SAP's periodogram grid");

  CommonOptions sweep_opts;
  std::string axis = "noise_power_dBm", values, range, filter = "both";
  int drops = 0;
  std::vector<int> saps;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo parameter sweep to CSV");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "noise_power_dBm | n_saps | n_antennas | bandwidth | n_targets | room_side");
  sweep->add_option("--values", values, "Comma separated axis values");
  sweep->add_option("--range", range, "start:stop:step, inclusive");
  sweep->add_option("--drops", drops, "Drops per sweep point")->required()->check(CLI::PositiveNumber);
  sweep->add_option("--saps", saps, "SAP counts to evaluate (default 1 2 3 4)")->delimiter(',');
  sweep->add_option("--filter", filter, "Multi-node filter: both | on | off")
      ->check(CLI::IsMember({"both", "on", "off"}));

  CommonOptions base_opts;
  std::string base_axis = "noise_power_dBm", base_values, base_range;
  int base_drops = 0;
  auto* baseline = app.add_subcommand("baseline", "Single impulsive target, max-peak estimator, one SAP");
  add_common(baseline, base_opts);
  baseline->add_option("--axis", base_axis, "Sweep axis");
  baseline->add_option("--values", base_values, "Comma separated axis values");
  baseline->add_option("--range", base_range, "start:stop:step, inclusive");
  baseline->add_option("--drops", base_drops, "Drops per sweep point")->required()->check(CLI::PositiveNumber);

  CommonOptions val_opts;
  bool quick = false;
  auto* validate = app.add_subcommand("validate", "Run calibration and invariant self-checks");
  add_common(validate, val_opts);
  validate->add_flag("--quick", quick, "Fewer Monte-Carlo trials");

  std::string fuse_config, fuse_peaks, fuse_out;
  std::vector<std::string> fuse_overrides;
  auto* fuse = app.add_subcommand("fuse", "Fuse a peak-report JSON lines file");
  fuse->add_option("-c,--config", fuse_config, "JSON config file")->check(CLI::ExistingFile);
  fuse->add_option("--set", fuse_overrides, "Override a config key");
  fuse->add_option("--peaks", fuse_peaks, "Peak reports, one JSON object per line")->required()->check(CLI::ExistingFile);
  fuse->add_option("-o,--out", fuse_out, "Output JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts, dump);
    if (*sweep) return cmd_sweep(sweep_opts, axis, values, range, drops, saps, filter, false);
    if (*baseline) return cmd_sweep(base_opts, base_axis, base_values, base_range, base_drops, {}, "off", true);
    if (*validate) return cmd_validate(val_opts, quick);
    if (*fuse) return cmd_fuse(fuse_config, fuse_overrides, fuse_peaks, fuse_out);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

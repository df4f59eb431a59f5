#include "core/calibration.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "core/extraction.hpp"
#include "core/ofdm.hpp"
#include "core/periodogram.hpp"
#include "core/rng.hpp"

namespace msense {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Noise-only or single-path estimated CTF with unit symbol power, so CTF noise variance = sigma^2.
EstimatedCtf noisy_ctf(const Ctf& ctf, double sigma2, std::uint64_t seed) {
  const auto n = static_cast<int>(ctf.h.rows());
  const auto symbols = generate_symbols(n, 1.0, child_seed(seed, stream::kSymbols));
  NoiseSpec noise;
  noise.n_subcarriers = n;
  noise.total_dbm = watts_to_dbm(sigma2 * n);
  noise.disabled = !(sigma2 > 0.0);
  const CMatrix y = apply_channel_and_noise(ctf.h, symbols, noise, child_seed(seed, stream::kNoise));
  return equalize(y, symbols, ctf.grid);
}

Path synthetic_path(double roundtrip, double azimuth, cdouble coefficient) {
  Path p;
  p.roundtrip_length = roundtrip;
  p.azimuth = azimuth;
  p.coefficient = coefficient;
  return p;
}

}  // namespace

CheckResult check_processing_gain(int n_subcarriers, int n_antennas, int seeds, std::uint64_t root_seed) {
  const CtfGrid grid = make_grid(n_subcarriers, n_antennas, 100e6, 26e9);
  const BinCalibration cal{n_subcarriers, n_antennas, grid.subcarrier_spacing_hz, grid.element_spacing_m,
                           grid.carrier_hz};
  const int range_bin = n_subcarriers / 8;
  const int angle_bin = 1;
  const PhysicalCoord where = bin_to_physical(range_bin, angle_bin, cal);
  const Ctf ctf = build_ctf(PathSet{0, {synthetic_path(where.roundtrip_length, where.azimuth, 1.0)}}, grid);
  const double sigma2 = 1.0;  // gamma_com = |alpha|^2 / sigma^2 = 1
  const WindowSpec rect{WindowKind::Rectangular, 0.0};
  const PadSpec no_pad{1, 1, false};

  double peak_sum = 0.0;
  double floor_sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Periodogram pg = compute_periodogram(noisy_ctf(ctf, sigma2, child_seed(root_seed, s)), rect, no_pad);
    const double peak = pg.values(static_cast<std::size_t>(range_bin), static_cast<std::size_t>(angle_bin));
    double total = 0.0;
    for (double v : pg.values.data()) total += v;
    peak_sum += peak;
    floor_sum += (total - peak) / static_cast<double>(pg.values.size() - 1);
  }
  CheckResult r;
  r.name = "processing_gain";
  r.measured = linear_to_db(peak_sum / floor_sum);
  r.expected = linear_to_db(static_cast<double>(n_subcarriers) * n_antennas / sigma2);
  r.tolerance = 0.5;
  r.passed = std::abs(r.measured - r.expected) <= r.tolerance;
  r.detail = fmt("peak/floor %.3f dB, N_sub*K*gamma_com %.3f dB", r.measured, r.expected);
  return r;
}

CheckResult check_false_alarm_rate(int n_subcarriers, int n_antennas, double p_fa, int maps, std::uint64_t root_seed) {
  const CtfGrid grid = make_grid(n_subcarriers, n_antennas, 100e6, 26e9);
  const Ctf empty{grid, CMatrix(static_cast<std::size_t>(n_subcarriers), static_cast<std::size_t>(n_antennas))};
  const WindowSpec rect{WindowKind::Rectangular, 0.0};
  const PadSpec no_pad{1, 1, false};
  const double sigma2 = 1.0;
  int alarms = 0;
  for (int m = 0; m < maps; ++m) {
    const Periodogram pg = compute_periodogram(noisy_ctf(empty, sigma2, child_seed(root_seed, m)), rect, no_pad);
    const double zeta = cfar_threshold(sigma2 * pg.noise_floor_factor, p_fa, n_subcarriers, n_antennas);
    const double peak = *std::max_element(pg.values.data().begin(), pg.values.data().end());
    if (std::sqrt(peak) > zeta) ++alarms;
  }
  CheckResult r;
  r.name = "cfar_false_alarm_rate";
  r.measured = static_cast<double>(alarms) / maps;
  r.expected = p_fa;
  r.tolerance = 3.0 * std::sqrt(p_fa * (1.0 - p_fa) / maps);
  r.passed = std::abs(r.measured - r.expected) <= r.tolerance;
  r.detail = fmt("observed %.4f, target %.4f", r.measured, r.expected);
  return r;
}

CheckResult check_localization(const SimConfig& cfg, int cases, std::uint64_t root_seed) {
  const CtfGrid grid = cfg.grid();
  Rng rng(root_seed);
  std::uniform_real_distribution<double> range(1.0, 12.0);
  std::uniform_real_distribution<double> angle(-60.0, 60.0);
  double worst_range = 0.0;
  double worst_angle = 0.0;
  double worst_power = 0.0;
  for (int c = 0; c < cases; ++c) {
    const double l = 2.0 * range(rng);
    const double az = angle(rng) * kPi / 180.0;
    const Ctf ctf = build_ctf(PathSet{0, {synthetic_path(l, az, 1.0)}}, grid);
    const Periodogram pg = compute_periodogram(EstimatedCtf{grid, ctf.h}, cfg.window, cfg.pad);
    const auto& data = pg.values.data();
    const auto flat = static_cast<std::size_t>(std::max_element(data.begin(), data.end()) - data.begin());
    const int cols = static_cast<int>(pg.values.cols());
    const int n0 = static_cast<int>(flat / static_cast<std::size_t>(cols));
    const int k0 = static_cast<int>(flat % static_cast<std::size_t>(cols));
    const InterpolatedPeak ip = interpolate_peak(pg.values, n0, k0);
    const auto [true_n, true_k] = physical_to_bin(l, az, pg.calibration);
    const double range_ratio = static_cast<double>(pg.calibration.n_range_bins) / pg.n_subcarriers;
    const double angle_ratio = static_cast<double>(pg.calibration.n_angle_bins) / pg.n_antennas;
    double dk = (k0 + ip.delta_angle) - true_k;
    dk -= std::round(dk / cols) * cols;
    worst_range = std::max(worst_range, std::abs(n0 + ip.delta_range - true_n) / range_ratio);
    worst_angle = std::max(worst_angle, std::abs(dk) / angle_ratio);
    worst_power = std::max(worst_power, std::abs(linear_to_db(ip.power / pg.coherent_factor)));
  }
  CheckResult r;
  r.name = "localization_round_trip";
  r.measured = std::max(worst_range, worst_angle);
  r.expected = 0.0;
  r.tolerance = 0.1;
  r.passed = worst_range < 0.1 && worst_angle < 0.1 && worst_power < 0.2;
  char buf[200];
  std::snprintf(buf, sizeof buf, "worst range %.4f bin, angle %.4f bin, scalloping %.4f dB", worst_range, worst_angle,
                worst_power);
  r.detail = buf;
  return r;
}

CheckResult check_window_sidelobes(int length, double attenuation_db) {
  const auto w = chebyshev_window(length, attenuation_db);
  const WindowWeights ww = make_window({WindowKind::Chebyshev, attenuation_db}, length);
  const int oversample = 64;
  const int n = length * oversample;
  double peak = 0.0;
  double sidelobe = 0.0;
  for (int f = 0; f <= n / 2; ++f) {
    cdouble acc{};
    for (int i = 0; i < length; ++i) acc += w[static_cast<std::size_t>(i)] * std::polar(1.0, -2.0 * kPi * f * i / n);
    const double mag = std::abs(acc);
    if (f == 0) peak = mag;
    if (static_cast<double>(f) / oversample > ww.mainlobe_halfwidth_bins) sidelobe = std::max(sidelobe, mag);
  }
  CheckResult r;
  r.name = "chebyshev_sidelobes";
  r.measured = 20.0 * std::log10(sidelobe / peak);
  r.expected = -attenuation_db;
  r.tolerance = 0.5;
  r.passed = std::abs(r.measured - r.expected) <= r.tolerance;
  r.detail = fmt("max sidelobe %.3f dB, design %.3f dB", r.measured, r.expected);
  return r;
}

CheckResult check_thermal_operating_point() {
  CheckResult r;
  r.name = "thermal_operating_point";
  r.measured = thermal_noise_dbm(800e6, 0.0);
  r.expected = -84.97;
  r.tolerance = 0.1;
  r.passed = std::abs(r.measured - r.expected) <= r.tolerance;
  r.detail = fmt("800 MHz floor %.3f dBm before NF, %.3f dBm with NF 8 dB", r.measured, thermal_noise_dbm(800e6, 8.0));
  return r;
}

std::vector<CheckResult> run_validation(const SimConfig& cfg, bool quick) {
  std::vector<CheckResult> out;
  out.push_back(check_thermal_operating_point());
  out.push_back(check_window_sidelobes(64, cfg.window.kind == WindowKind::Chebyshev ? cfg.window.sidelobe_attenuation_db : 30.0));
  out.push_back(check_processing_gain(256, 8, quick ? 30 : 100, cfg.seed));
  out.push_back(check_false_alarm_rate(256, 8, 0.01, quick ? 2000 : 10000, cfg.seed));
  out.push_back(check_localization(cfg, quick ? 10 : 50, cfg.seed));
  return out;
}

}  // namespace msense

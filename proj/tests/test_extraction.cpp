#include <doctest.h>

#include <random>

#include "core/extraction.hpp"
#include "core/rng.hpp"

using namespace msense;

namespace {

Path path_at(double roundtrip, double azimuth, cdouble alpha) {
  Path p;
  p.roundtrip_length = roundtrip;
  p.azimuth = azimuth;
  p.coefficient = alpha;
  return p;
}

Periodogram map_of(const std::vector<Path>& paths, const CtfGrid& grid, const WindowSpec& window = {},
                   const PadSpec& pad = {}) {
  return compute_periodogram(EstimatedCtf{grid, build_ctf(PathSet{0, paths}, grid).h}, window, pad);
}

BinCalibration unpadded(const CtfGrid& g) {
  return {g.n_subcarriers, g.n_antennas, g.subcarrier_spacing_hz, g.element_spacing_m, g.carrier_hz};
}

RMatrix grid3(double l, double c, double r, double up, double down) {
  // 3 x 3 neighbourhood in dB around (1, 1); range along rows, angle along columns
  RMatrix m(3, 3, 1e-30);
  m(1, 1) = db_to_linear(c);
  m(1, 0) = db_to_linear(l);
  m(1, 2) = db_to_linear(r);
  m(0, 1) = db_to_linear(up);
  m(2, 1) = db_to_linear(down);
  return m;
}

}  // namespace

TEST_CASE("CFAR threshold against a high-precision reference") {
  // 40-digit reference values
  CHECK(cfar_threshold(1.0, 0.01, 2984, 8) == doctest::Approx(3.8315285383623007).epsilon(1e-13));
  CHECK(cfar_threshold(1.0, 0.01, 256, 8) == doctest::Approx(3.4963939518638702).epsilon(1e-13));
  CHECK(cfar_threshold(1.0, 1e-6, 2984, 8) == doctest::Approx(4.8883505971839313).epsilon(1e-13));
  CHECK(cfar_threshold(1.0, 0.5, 1, 1) == doctest::Approx(0.83255461115769776).epsilon(1e-13));
}

TEST_CASE("CFAR threshold scaling and limits") {
  const double z = cfar_threshold(2.5, 0.01, 2984, 8);
  CHECK(cfar_threshold(10.0, 0.01, 2984, 8) == doctest::Approx(2.0 * z));
  CHECK(cfar_threshold(1.0, 1.0 - 1e-12, 1, 1) == doctest::Approx(1e-6).epsilon(1e-3));
  CHECK(cfar_threshold(0.0, 0.01, 2984, 8) == 0.0);
  CHECK(cfar_threshold(1.0, 0.001, 2984, 8) > cfar_threshold(1.0, 0.01, 2984, 8));
  CHECK_THROWS_AS(cfar_threshold(1.0, 0.0, 8, 8), Error);
  CHECK_THROWS_AS(cfar_threshold(1.0, 1.0, 8, 8), Error);
  CHECK_THROWS_AS(cfar_threshold(-1.0, 0.1, 8, 8), Error);
}

TEST_CASE("effective threshold") {
  CHECK(effective_threshold(0.3, 0.0, 4.0, 30.0) == 0.3);
  CHECK(effective_threshold(0.3, 1e6, 4.0, 30.0) == doctest::Approx(4.0 * 1e6 * std::pow(10.0, -1.5)));
  CHECK(effective_threshold(1e-3, 1.0, 4.0, 30.0) == doctest::Approx(4.0 * std::pow(10.0, -1.5)));
  CHECK(effective_threshold(1.0, 1.0, 4.0, 30.0) == 1.0);
  CHECK_THROWS_AS(effective_threshold(-1.0, 1.0, 4.0, 30.0), Error);
}

TEST_CASE("quadratic interpolation") {
  SUBCASE("symmetric neighbours") {
    const InterpolatedPeak ip = interpolate_peak(grid3(-3, 0, -3, -5, -5), 1, 1);
    CHECK(ip.delta_range == 0.0);
    CHECK(ip.delta_angle == 0.0);
    CHECK(linear_to_db(ip.power) == doctest::Approx(0.0));
  }
  SUBCASE("parabola vertex and refined power") {
    const InterpolatedPeak ip = interpolate_peak(grid3(-1, 0, -4, -2, -6), 1, 1);
    // delta = (L - R) / (2 (L - 2C + R)), C - (L - R) delta / 4
    const double da = (-1.0 + 4.0) / (2.0 * (-1.0 - 4.0));
    const double dr = (-2.0 + 6.0) / (2.0 * (-2.0 - 6.0));
    CHECK(ip.delta_angle == doctest::Approx(da));
    CHECK(ip.delta_range == doctest::Approx(dr));
    CHECK(linear_to_db(ip.power) == doctest::Approx(0.0 - 3.0 * da / 4.0 - 4.0 * dr / 4.0));
  }
  SUBCASE("degenerate curvature falls back to the bin") {
    const InterpolatedPeak ip = interpolate_peak(grid3(0, 0, 0, 0, 0), 1, 1);
    CHECK(ip.delta_range == 0.0);
    CHECK(ip.delta_angle == 0.0);
  }
  SUBCASE("offsets are clamped to half a bin") {
    // a shoulder higher than the centre is not a local max; the clamp keeps the estimate in the bin
    const InterpolatedPeak ip = interpolate_peak(grid3(-0.1, 0, -30, -3, -3), 1, 1);
    CHECK(ip.delta_angle >= -0.5);
    CHECK(ip.delta_angle <= 0.5);
  }
  SUBCASE("range edge is not interpolated in range") {
    RMatrix m(4, 4, 1e-3);
    m(0, 1) = 1.0;
    m(1, 1) = 0.5;
    const InterpolatedPeak ip = interpolate_peak(m, 0, 1);
    CHECK(ip.delta_range == 0.0);
  }
}

TEST_CASE("interpolation removes scalloping over sub-bin offsets") {
  const CtfGrid grid = make_grid(256, 8, 100e6, 26e9);
  const BinCalibration cal = unpadded(grid);
  double worst_pos = 0.0;
  double worst_db = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double frac = i / 20.0;
    const PhysicalCoord where = bin_to_physical(40.0 + frac, 1.0 + 0.7 * frac, cal);
    const Periodogram pg = map_of({path_at(where.roundtrip_length, where.azimuth, 1.0)}, grid);
    const auto it = std::max_element(pg.values.data().begin(), pg.values.data().end());
    const auto flat = static_cast<std::size_t>(it - pg.values.data().begin());
    const int n0 = static_cast<int>(flat / pg.values.cols());
    const int k0 = static_cast<int>(flat % pg.values.cols());
    const InterpolatedPeak ip = interpolate_peak(pg.values, n0, k0);
    const auto [tn, tk] = physical_to_bin(where.roundtrip_length, where.azimuth, pg.calibration);
    const double rn = pg.values.rows() / 256.0;
    const double rk = pg.values.cols() / 8.0;
    worst_pos = std::max(worst_pos, std::abs(n0 + ip.delta_range - tn) / rn);
    worst_pos = std::max(worst_pos, std::abs(k0 + ip.delta_angle - tk) / rk);
    worst_db = std::max(worst_db, std::abs(linear_to_db(ip.power / pg.coherent_factor)));
  }
  CHECK(worst_pos < 0.1);
  CHECK(worst_db < 0.2);
}

TEST_CASE("on-bin target interpolates exactly onto its bin") {
  const CtfGrid grid = make_grid(128, 8, 100e6, 26e9);
  const Periodogram probe = map_of({}, grid);
  const PhysicalCoord where = bin_to_physical(100, 4, probe.calibration);
  const Periodogram pg = map_of({path_at(where.roundtrip_length, where.azimuth, 1.0)}, grid);
  const InterpolatedPeak ip = interpolate_peak(pg.values, 100, 4);
  CHECK(std::abs(ip.delta_range) < 1e-9);
  CHECK(std::abs(ip.delta_angle) < 1e-9);
}

TEST_CASE("extraction on an empty map reports nothing") {
  const CtfGrid grid = make_grid(64, 8, 100e6, 26e9);
  const ExtractionResult r = extract_peaks(map_of({}, grid), CfarSpec{}, 1e-12, PeakContext{});
  CHECK(r.peaks.empty());
  CHECK_THROWS_AS(extract_peaks(map_of({}, grid), CfarSpec{0.01, 0.5, 30.0}, 1e-12, PeakContext{}), Error);
}

TEST_CASE("single target: one peak, sidelobes suppressed, calibrated power") {
  const CtfGrid grid = make_grid(2984, 8, 800e6, 26e9);
  const cdouble alpha = std::polar(3e-5, 0.4);
  const Periodogram pg = map_of({path_at(9.1, 0.35, alpha)}, grid);
  PeakContext ctx;
  ctx.sap_id = 2;
  ctx.noise_dbm = -77.0;
  ctx.tx_power_w = 1.0;
  const ExtractionResult r = extract_peaks(pg, CfarSpec{}, 0.0, ctx);
  REQUIRE(r.peaks.size() == 1);
  const PeakReport& p = r.peaks[0];
  CHECK(p.sap_id == 2);
  CHECK(p.noise_dbm == -77.0);
  CHECK(p.roundtrip_length == doctest::Approx(9.1).epsilon(0.1 * kSpeedOfLight / 800e6 / 9.1));
  CHECK(std::abs(std::sin(p.azimuth) - std::sin(0.35)) < 0.1 * 2.0 / 8.0);
  CHECK(std::abs(p.power_dbm - watts_to_dbm(std::norm(alpha))) < 0.2);
  CHECK(p.radius_range_bins >= pg.range_mainlobe_bins);
  CHECK(p.radius_angle_bins >= pg.angle_mainlobe_bins);
  CHECK(r.zeta_cfar == 0.0);
  CHECK(r.zeta_effective == doctest::Approx(4.0 * std::pow(10.0, -1.5) * std::sqrt(pg.values(p.range_bin, p.angle_bin))));
}

TEST_CASE("two separated targets give exactly two peaks at their bins") {
  const CtfGrid grid = make_grid(256, 8, 100e6, 26e9);
  const BinCalibration cal = unpadded(grid);
  const PhysicalCoord a = bin_to_physical(40, 1, cal);
  const PhysicalCoord b = bin_to_physical(60, 6, cal);
  const Periodogram pg = map_of({path_at(a.roundtrip_length, a.azimuth, 1.0), path_at(b.roundtrip_length, b.azimuth, 0.5)},
                                grid);
  const ExtractionResult r = extract_peaks(pg, CfarSpec{}, 0.0, PeakContext{});
  REQUIRE(r.peaks.size() == 2);
  CHECK(r.peaks[0].range_bin == 160);
  CHECK(r.peaks[0].angle_bin == 4);
  CHECK(r.peaks[1].range_bin == 240);
  CHECK(r.peaks[1].angle_bin == 24);
  CHECK(r.peaks[0].roundtrip_length == doctest::Approx(a.roundtrip_length).epsilon(1e-3));
  CHECK(r.peaks[1].azimuth == doctest::Approx(b.azimuth).epsilon(1e-3));
}

TEST_CASE("weak target below the sidelobe margin is not reported") {
  const CtfGrid grid = make_grid(256, 8, 100e6, 26e9);
  const BinCalibration cal = unpadded(grid);
  const PhysicalCoord a = bin_to_physical(40, 1, cal);
  const PhysicalCoord b = bin_to_physical(120, 2, cal);
  // 20 dB below the strong target, beyond the 12 dB margin above the -30 dB sidelobes
  const Periodogram pg = map_of({path_at(a.roundtrip_length, a.azimuth, 1.0), path_at(b.roundtrip_length, b.azimuth, 0.1)},
                                grid);
  CHECK(extract_peaks(pg, CfarSpec{}, 0.0, PeakContext{}).peaks.size() == 1);
  // with a power-domain margin the same target clears the threshold
  CfarSpec power = CfarSpec{};
  power.kappa_on_power = true;
  CHECK(extract_peaks(pg, power, 0.0, PeakContext{}).peaks.size() == 2);
}

TEST_CASE("noisy maps: monotone in the threshold, no peak inside an earlier ellipse") {
  const CtfGrid grid = make_grid(256, 8, 100e6, 26e9);
  Rng rng(8);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix h = build_ctf(PathSet{0, {path_at(6.0 + trial * 0.3, -0.3, 0.2), path_at(14.0, 0.5, 0.05)}}, grid).h;
    for (auto& v : h.data()) v += cdouble(g(rng), g(rng)) * 0.02;
    const Periodogram pg = compute_periodogram(EstimatedCtf{grid, h}, WindowSpec{}, PadSpec{});
    const double floor = 0.02 * 0.02 * pg.noise_floor_factor;
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (double kappa : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const auto peaks = extract_peaks(pg, CfarSpec{0.01, kappa, 30.0}, floor, PeakContext{}).peaks;
      CHECK(peaks.size() <= previous);
      previous = peaks.size();
    }
    const auto peaks = extract_peaks(pg, CfarSpec{0.01, 1.0, 30.0}, floor, PeakContext{}).peaks;
    const int cols = static_cast<int>(pg.values.cols());
    for (std::size_t j = 0; j < peaks.size(); ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        const double dn = peaks[j].range_bin - peaks[i].range_bin;
        int dk = std::abs(peaks[j].angle_bin - peaks[i].angle_bin);
        dk = std::min(dk, cols - dk);
        const double en = dn / peaks[i].radius_range_bins;
        const double ek = dk / peaks[i].radius_angle_bins;
        CHECK(en * en + ek * ek > 1.0);
      }
    }
  }
}

TEST_CASE("raising the CFAR threshold never adds peaks") {
  const CtfGrid grid = make_grid(256, 8, 100e6, 26e9);
  Rng rng(21);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  EstimatedCtf est{grid, CMatrix(256, 8)};
  for (auto& v : est.h.data()) v = {g(rng), g(rng)};
  const Periodogram pg = compute_periodogram(est, WindowSpec{}, PadSpec{});
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (double floor_scale : {0.01, 0.1, 0.5, 1.0, 2.0}) {
    const auto n = extract_peaks(pg, CfarSpec{0.01, 1.0, 30.0}, floor_scale * pg.noise_floor_factor, PeakContext{})
                       .peaks.size();
    CHECK(n <= previous);
    previous = n;
  }
}

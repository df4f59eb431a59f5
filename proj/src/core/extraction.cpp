#include "core/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace msense {

double cfar_threshold(double noise_floor, double p_fa, int n_subcarriers, int n_antennas) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw_invalid("P_FA must lie in (0, 1)");
  if (noise_floor < 0.0) throw_invalid("noise power must be non-negative");
  if (n_subcarriers < 1 || n_antennas < 1) throw_invalid("cell count must be positive");
  const double cells = static_cast<double>(n_subcarriers) * n_antennas;
  // 1 - (1 - P_FA)^(1/cells), without cancellation for large cell counts.
  const double per_cell = -std::expm1(std::log1p(-p_fa) / cells);
  return std::sqrt(-noise_floor * std::log(per_cell));
}

double effective_threshold(double zeta_cfar, double max_peak_amplitude, double kappa, double sidelobe_attenuation_db) {
  if (zeta_cfar < 0.0 || max_peak_amplitude < 0.0 || kappa < 0.0) {
    throw_invalid("thresholds and amplitudes must be non-negative");
  }
  const double sidelobe = max_peak_amplitude * std::pow(10.0, -sidelobe_attenuation_db / 20.0);
  return std::max(zeta_cfar, kappa * sidelobe);
}

namespace {

// Vertex offset of the parabola through (-1, l), (0, c), (1, r).
double parabola_offset(double l, double c, double r) {
  const double curvature = l - 2.0 * c + r;
  if (!(curvature < 0.0)) return 0.0;
  return std::clamp((l - r) / (2.0 * curvature), -0.5, 0.5);
}

// Walks from the peak until the profile stops decreasing or drops below the floor.
double profile_radius(const RMatrix& v, int n0, int k0, int axis, int dir, double floor) {
  const int rows = static_cast<int>(v.rows());
  const int cols = static_cast<int>(v.cols());
  const int limit = axis == 0 ? rows : cols / 2;
  auto at = [&](int step) {
    if (axis == 0) return v(static_cast<std::size_t>(n0 + dir * step), static_cast<std::size_t>(k0));
    const int k = ((k0 + dir * step) % cols + cols) % cols;
    return v(static_cast<std::size_t>(n0), static_cast<std::size_t>(k));
  };
  int r = 1;
  for (; r < limit; ++r) {
    if (axis == 0 && (n0 + dir * r < 0 || n0 + dir * r >= rows)) break;
    const double cur = at(r);
    if (cur >= at(r - 1) || cur < floor) break;
  }
  return static_cast<double>(r);
}

// Per-row maxima so the global maximum costs one pass over the rows; the first maximum in
// row-major order wins, as with a flat scan.
class RowMaxIndex {
 public:
  explicit RowMaxIndex(const RMatrix& v) : v_(v), best_(v.rows()) {
    for (std::size_t n = 0; n < v.rows(); ++n) refresh(n);
  }
  void refresh(std::size_t n) {
    const double* row = &v_(n, 0);
    best_[n] = static_cast<std::size_t>(std::max_element(row, row + v_.cols()) - row);
  }
  // (row, col) of the global maximum.
  std::pair<std::size_t, std::size_t> argmax() const {
    std::size_t best_row = 0;
    for (std::size_t n = 1; n < best_.size(); ++n) {
      if (v_(n, best_[n]) > v_(best_row, best_[best_row])) best_row = n;
    }
    return {best_row, best_[best_row]};
  }

 private:
  const RMatrix& v_;
  std::vector<std::size_t> best_;
};

void cancel_ellipse(RMatrix& v, int n0, int k0, double rn, double rk) {
  const int rows = static_cast<int>(v.rows());
  const int cols = static_cast<int>(v.cols());
  const int span_n = static_cast<int>(std::floor(rn));
  const int span_k = static_cast<int>(std::floor(rk));
  for (int dn = -span_n; dn <= span_n; ++dn) {
    const int n = n0 + dn;
    if (n < 0 || n >= rows) continue;
    const double en = static_cast<double>(dn) / rn;
    for (int dk = -span_k; dk <= span_k; ++dk) {
      const double ek = static_cast<double>(dk) / rk;
      if (en * en + ek * ek > 1.0) continue;
      const int k = ((k0 + dk) % cols + cols) % cols;
      v(static_cast<std::size_t>(n), static_cast<std::size_t>(k)) = 0.0;
    }
  }
}

}  // namespace

InterpolatedPeak interpolate_peak(const RMatrix& values, int range_bin, int angle_bin) {
  const int rows = static_cast<int>(values.rows());
  const int cols = static_cast<int>(values.cols());
  auto val = [&](int n, int k) {
    k = ((k % cols) + cols) % cols;
    return values(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  };
  InterpolatedPeak out;
  const double c_lin = val(range_bin, angle_bin);
  out.power = c_lin;
  if (!(c_lin > 0.0)) return out;
  const double c = linear_to_db(c_lin);
  double power_db = c;

  if (range_bin > 0 && range_bin < rows - 1) {
    const double l_lin = val(range_bin - 1, angle_bin);
    const double r_lin = val(range_bin + 1, angle_bin);
    if (l_lin > 0.0 && r_lin > 0.0) {
      const double l = linear_to_db(l_lin);
      const double r = linear_to_db(r_lin);
      out.delta_range = parabola_offset(l, c, r);
      power_db -= (l - r) * out.delta_range / 4.0;
    }
  }
  if (cols >= 3) {
    const double l_lin = val(range_bin, angle_bin - 1);
    const double r_lin = val(range_bin, angle_bin + 1);
    if (l_lin > 0.0 && r_lin > 0.0) {
      const double l = linear_to_db(l_lin);
      const double r = linear_to_db(r_lin);
      out.delta_angle = parabola_offset(l, c, r);
      power_db -= (l - r) * out.delta_angle / 4.0;
    }
  }
  out.power = db_to_linear(power_db);
  return out;
}

ExtractionResult extract_peaks(const Periodogram& pg, const CfarSpec& spec, double noise_floor,
                               const PeakContext& ctx) {
  if (!(spec.kappa >= 1.0)) throw_invalid("kappa must be >= 1");
  ExtractionResult result;
  result.zeta_cfar = cfar_threshold(noise_floor, spec.p_fa, pg.n_subcarriers, pg.n_antennas);
  if (pg.values.empty()) return result;

  RMatrix work = pg.values;
  const double min_rn = std::max(1.0, pg.range_mainlobe_bins);
  const double min_rk = std::max(1.0, pg.angle_mainlobe_bins);
  bool first = true;
  double zeta = result.zeta_cfar;

  RowMaxIndex index(work);
  const std::size_t max_iterations = work.size();
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    const auto [max_row, max_col] = index.argmax();
    const double peak_value = work(max_row, max_col);
    const double amplitude = std::sqrt(std::max(peak_value, 0.0));
    if (first) {
      zeta = effective_threshold(result.zeta_cfar, amplitude, spec.kappa_on_power ? std::sqrt(spec.kappa) : spec.kappa,
                                 spec.sidelobe_attenuation_db);
      result.zeta_effective = zeta;
      first = false;
    }
    if (amplitude <= zeta) break;

    const int n0 = static_cast<int>(max_row);
    const int k0 = static_cast<int>(max_col);

    const double rn = std::max(min_rn, std::max(profile_radius(work, n0, k0, 0, -1, noise_floor),
                                                profile_radius(work, n0, k0, 0, +1, noise_floor)));
    const double rk = std::max(min_rk, std::max(profile_radius(work, n0, k0, 1, -1, noise_floor),
                                                profile_radius(work, n0, k0, 1, +1, noise_floor)));

    const InterpolatedPeak ip = interpolate_peak(pg.values, n0, k0);
    const PhysicalCoord coord = bin_to_physical(n0 + ip.delta_range, k0 + ip.delta_angle, pg.calibration);
    if (coord.visible && coord.roundtrip_length >= 0.0) {
      PeakReport peak;
      peak.sap_id = ctx.sap_id;
      peak.roundtrip_length = coord.roundtrip_length;
      peak.azimuth = coord.azimuth;
      peak.power_dbm = watts_to_dbm(ip.power / pg.coherent_factor * ctx.tx_power_w);
      peak.range_bin = n0;
      peak.angle_bin = k0;
      peak.range_bin_frac = n0 + ip.delta_range;
      peak.angle_bin_frac = k0 + ip.delta_angle;
      peak.radius_range_bins = rn;
      peak.radius_angle_bins = rk;
      peak.noise_dbm = ctx.noise_dbm;
      result.peaks.push_back(peak);
    }
    cancel_ellipse(work, n0, k0, rn, rk);
    const int span_n = static_cast<int>(std::floor(rn));
    const int rows = static_cast<int>(work.rows());
    for (int n = std::max(0, n0 - span_n); n <= std::min(rows - 1, n0 + span_n); ++n) {
      index.refresh(static_cast<std::size_t>(n));
    }
  }
  return result;
}

}  // namespace msense

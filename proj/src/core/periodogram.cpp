#include "core/periodogram.hpp"

#include <fftw3.h>

#include <bit>
#include <map>
#include <memory>
#include <mutex>

namespace msense {

namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {
    if (data == nullptr) throw Error(ErrorCode::Internal, "fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
  std::size_t size;
};

// Plans are created once per shape under a lock and then executed with the
// thread-safe new-array interface. FFTW_ESTIMATE keeps plans reproducible.
fftw_plan forward_plan_2d(int rows, int cols) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(rows, cols);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  FftwBuffer scratch(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  fftw_plan plan = fftw_plan_dft_2d(rows, cols, scratch.data, scratch.data, FFTW_FORWARD, FFTW_ESTIMATE);
  if (plan == nullptr) throw Error(ErrorCode::Internal, "FFTW planning failed");
  plans.emplace(key, plan);
  return plan;
}

}  // namespace

int padded_size(int n, int factor, bool round_to_pow2) {
  if (n < 1 || factor < 1) throw_invalid("padding needs positive size and factor");
  const auto raw = static_cast<unsigned>(n) * static_cast<unsigned>(factor);
  return round_to_pow2 ? static_cast<int>(std::bit_ceil(raw)) : static_cast<int>(raw);
}

Periodogram compute_periodogram(const EstimatedCtf& est, const WindowSpec& window, const PadSpec& pad) {
  if (est.h.empty()) throw_invalid("periodogram of an empty CTF");
  const int n_sub = static_cast<int>(est.h.rows());
  const int n_ant = static_cast<int>(est.h.cols());
  const int rows = padded_size(n_sub, pad.range_factor, pad.round_to_pow2);
  const int cols = padded_size(n_ant, pad.angle_factor, pad.round_to_pow2);

  const WindowWeights wr = make_window(window, n_sub);
  const WindowWeights wa = make_window(window, n_ant);

  FftwBuffer buf(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  std::fill_n(reinterpret_cast<double*>(buf.data), 2 * buf.size, 0.0);
  for (int m = 0; m < n_sub; ++m) {
    for (int i = 0; i < n_ant; ++i) {
      const cdouble v = est.h(static_cast<std::size_t>(m), static_cast<std::size_t>(i)) *
                        (wr.w[static_cast<std::size_t>(m)] * wa.w[static_cast<std::size_t>(i)]);
      fftw_complex& dst = buf.data[static_cast<std::size_t>(m) * cols + i];
      dst[0] = v.real();
      dst[1] = v.imag();
    }
  }
  fftw_execute_dft(forward_plan_2d(rows, cols), buf.data, buf.data);

  Periodogram pg;
  pg.values = RMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  const double scale = 1.0 / (static_cast<double>(rows) * cols);
  // The subcarrier axis uses e^{+j...}: read the forward transform at -n' mod N'.
  for (int n = 0; n < rows; ++n) {
    const int src = (rows - n) % rows;
    const fftw_complex* row = &buf.data[static_cast<std::size_t>(src) * cols];
    for (int k = 0; k < cols; ++k) {
      pg.values(static_cast<std::size_t>(n), static_cast<std::size_t>(k)) =
          (row[k][0] * row[k][0] + row[k][1] * row[k][1]) * scale;
    }
  }

  pg.calibration = {rows, cols, est.grid.subcarrier_spacing_hz, est.grid.element_spacing_m, est.grid.carrier_hz};
  pg.n_subcarriers = n_sub;
  pg.n_antennas = n_ant;
  pg.window = window;
  pg.noise_floor_factor = wr.power_gain * wa.power_gain * scale;
  pg.coherent_factor = wr.coherent_gain * wr.coherent_gain * wa.coherent_gain * wa.coherent_gain * scale;
  pg.range_mainlobe_bins = wr.mainlobe_halfwidth_bins * rows / n_sub;
  pg.angle_mainlobe_bins = wa.mainlobe_halfwidth_bins * cols / n_ant;
  return pg;
}

PhysicalCoord bin_to_physical(double range_bin, double angle_bin, const BinCalibration& cal) {
  PhysicalCoord out;
  out.roundtrip_length = range_bin * cal.range_bin_m();
  const double k = static_cast<double>(cal.n_angle_bins);
  double wrapped = std::fmod(angle_bin, k);
  if (wrapped < 0.0) wrapped += k;
  if (wrapped >= k / 2.0) wrapped -= k;
  const double lambda = kSpeedOfLight / cal.carrier_hz;
  out.sin_azimuth = wrapped / k * lambda / cal.element_spacing_m;
  out.visible = std::abs(out.sin_azimuth) < 1.0;
  out.azimuth = out.visible ? std::asin(out.sin_azimuth) : std::copysign(kPi / 2.0, out.sin_azimuth);
  return out;
}

std::pair<double, double> physical_to_bin(double roundtrip_length, double azimuth, const BinCalibration& cal) {
  const double lambda = kSpeedOfLight / cal.carrier_hz;
  const double range_bin = roundtrip_length / cal.range_bin_m();
  const double k = static_cast<double>(cal.n_angle_bins);
  double angle_bin = std::sin(azimuth) * cal.element_spacing_m / lambda * k;
  if (angle_bin < 0.0) angle_bin += k;
  return {range_bin, angle_bin};
}

}  // namespace msense

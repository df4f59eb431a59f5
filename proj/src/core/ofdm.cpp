#include "core/ofdm.hpp"

#include <limits>
#include <random>
#include <string>

#include "core/rng.hpp"

namespace msense {

std::vector<cdouble> generate_symbols(int n_subcarriers, double symbol_power_w, std::uint64_t rng_seed) {
  if (n_subcarriers < 1) throw_invalid("need at least one subcarrier");
  if (!(symbol_power_w > 0.0)) throw_invalid("symbol power must be positive");
  const double a = std::sqrt(symbol_power_w / 2.0);
  const cdouble constellation[4] = {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
  Rng rng(rng_seed);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<cdouble> x(static_cast<std::size_t>(n_subcarriers));
  for (auto& s : x) s = constellation[pick(rng)];
  return x;
}

CMatrix apply_channel_and_noise(const CMatrix& h, std::span<const cdouble> x, const NoiseSpec& noise,
                                std::uint64_t rng_seed) {
  if (h.rows() != x.size()) throw_invalid("symbol vector length does not match CTF subcarriers");
  CMatrix y(h.rows(), h.cols());
  const double sigma2 = noise.per_sample_variance();
  for (std::size_t n = 0; n < h.rows(); ++n) {
    for (std::size_t k = 0; k < h.cols(); ++k) y(n, k) = x[n] * h(n, k);
  }
  if (sigma2 > 0.0) {
    Rng rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2 / 2.0));
    for (auto& v : y.data()) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v += cdouble(re, im);
    }
  }
  return y;
}

EstimatedCtf equalize(const CMatrix& y, std::span<const cdouble> x, const CtfGrid& grid) {
  if (y.rows() != x.size()) throw_invalid("symbol vector length does not match received rows");
  EstimatedCtf est{grid, CMatrix(y.rows(), y.cols())};
  for (std::size_t n = 0; n < y.rows(); ++n) {
    if (x[n] == cdouble{}) throw_invalid("zero transmit symbol at subcarrier " + std::to_string(n));
    const cdouble inv = 1.0 / x[n];
    for (std::size_t k = 0; k < y.cols(); ++k) est.h(n, k) = y(n, k) * inv;
  }
  return est;
}

SnrReport snr_report(const Ctf& ctf, double symbol_power_w, const NoiseSpec& noise) {
  double mean_gain = 0.0;
  for (const auto& v : ctf.h.data()) mean_gain += std::norm(v);
  if (!ctf.h.empty()) mean_gain /= static_cast<double>(ctf.h.size());
  const double signal = mean_gain * symbol_power_w * ctf.grid.n_subcarriers;
  const double pn = noise.total_watts();
  SnrReport r;
  r.gamma_com = pn > 0.0 ? signal / pn : std::numeric_limits<double>::infinity();
  r.gamma_imag = r.gamma_com * ctf.grid.n_subcarriers * ctf.grid.n_antennas;
  return r;
}

double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0.0)) throw_invalid("bandwidth must be positive");
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

}  // namespace msense

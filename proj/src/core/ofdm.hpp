#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/raytracer.hpp"
#include "core/types.hpp"

namespace msense {

/// Total noise power over the band; each (subcarrier, antenna) sample carries P_N / N_sub.
struct NoiseSpec {
  double total_dbm = -76.97;
  int n_subcarriers = 2984;
  bool disabled = false;  // sigma^2 = 0

  double total_watts() const { return disabled ? 0.0 : dbm_to_watts(total_dbm); }
  double per_sample_variance() const { return total_watts() / n_subcarriers; }
};

/// Equalized, noisy estimate of the channel transfer function.
struct EstimatedCtf {
  CtfGrid grid;
  CMatrix h;
};

struct SnrReport {
  double gamma_com = 0.0;
  double gamma_imag = 0.0;
};

/// Constant-modulus QPSK symbols with |x_n|^2 = symbol_power_w.
std::vector<cdouble> generate_symbols(int n_subcarriers, double symbol_power_w, std::uint64_t rng_seed);

/// y[n,k] = x[n] h[n,k] + z[n,k], z ~ CN(0, sigma^2) i.i.d.
CMatrix apply_channel_and_noise(const CMatrix& h, std::span<const cdouble> x, const NoiseSpec& noise,
                                std::uint64_t rng_seed);

/// Single-tap equalization y / x. Throws InvalidArgument on a zero symbol.
EstimatedCtf equalize(const CMatrix& y, std::span<const cdouble> x, const CtfGrid& grid);

/// gamma_com = mean received signal power over the band / P_N; gamma_imag adds the N_sub*K DFT gain.
SnrReport snr_report(const Ctf& ctf, double symbol_power_w, const NoiseSpec& noise);

/// -174 dBm/Hz + 10 log10(B) + NF.
double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db = 0.0);

}  // namespace msense

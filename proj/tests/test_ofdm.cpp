#include <doctest.h>

#include "core/ofdm.hpp"

using namespace msense;

namespace {

CMatrix filled(std::size_t rows, std::size_t cols, cdouble v) { return CMatrix(rows, cols, v); }

NoiseSpec noise_with_variance(double sigma2, int n_sub) {
  NoiseSpec n;
  n.n_subcarriers = n_sub;
  n.total_dbm = watts_to_dbm(sigma2 * n_sub);
  return n;
}

}  // namespace

TEST_CASE("QPSK symbols have constant modulus and are reproducible") {
  const auto x = generate_symbols(1000, 2.5, 17);
  for (const auto& s : x) CHECK(std::norm(s) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(generate_symbols(1000, 2.5, 17) == x);
  CHECK(generate_symbols(1000, 2.5, 18) != x);
  CHECK_THROWS_AS(generate_symbols(0, 1.0, 1), Error);
}

TEST_CASE("QPSK symbol mean vanishes within the CLT bound") {
  const int n = 100000;
  const auto x = generate_symbols(n, 1.0, 3);
  cdouble sum{};
  for (const auto& s : x) sum += s;
  const cdouble mean = sum / static_cast<double>(n);
  // each component has variance 1/2
  const double bound = 3.0 * std::sqrt(0.5 / n);
  CHECK(std::abs(mean.real()) < bound);
  CHECK(std::abs(mean.imag()) < bound);
}

TEST_CASE("noise-free channel application") {
  const auto x = generate_symbols(16, 1.0, 1);
  NoiseSpec off;
  off.disabled = true;
  off.n_subcarriers = 16;
  const CMatrix h = filled(16, 3, {0.5, -0.25});
  const CMatrix y = apply_channel_and_noise(h, x, off, 9);
  for (std::size_t n = 0; n < 16; ++n) {
    for (std::size_t k = 0; k < 3; ++k) CHECK(y(n, k) == x[n] * h(n, k));
  }

  const std::vector<cdouble> ones(4, {1.0, 0.0});
  const CMatrix y1 = apply_channel_and_noise(filled(4, 2, {1.0, 0.0}), ones, off, 1);
  for (const auto& v : y1.data()) CHECK(v == cdouble{1.0, 0.0});
}

TEST_CASE("noise variance is sigma^2 per sample, before and after equalization") {
  const int n_sub = 125000;
  const double sigma2 = 3e-9;
  const auto x = generate_symbols(n_sub, 4.0, 2);
  const NoiseSpec noise = noise_with_variance(sigma2, n_sub);
  CHECK(noise.per_sample_variance() == doctest::Approx(sigma2));
  const CMatrix y = apply_channel_and_noise(CMatrix(n_sub, 8), x, noise, 77);
  double power = 0.0;
  cdouble mean{};
  for (const auto& v : y.data()) {
    power += std::norm(v);
    mean += v;
  }
  power /= static_cast<double>(y.size());
  CHECK(power == doctest::Approx(sigma2).epsilon(0.01));
  CHECK(std::abs(mean) / y.size() < 5 * std::sqrt(sigma2 / y.size()));

  const EstimatedCtf est = equalize(y, x, make_grid(n_sub, 8, 100e6, 26e9));
  double eq_power = 0.0;
  for (const auto& v : est.h.data()) eq_power += std::norm(v);
  eq_power /= static_cast<double>(est.h.size());
  CHECK(eq_power == doctest::Approx(sigma2 / 4.0).epsilon(0.01));
}

TEST_CASE("real and imaginary noise parts are balanced and uncorrelated") {
  const auto x = generate_symbols(100000, 1.0, 5);
  const CMatrix y = apply_channel_and_noise(CMatrix(100000, 2), x, noise_with_variance(1.0, 100000), 6);
  double rr = 0, ii = 0, ri = 0;
  for (const auto& v : y.data()) {
    rr += v.real() * v.real();
    ii += v.imag() * v.imag();
    ri += v.real() * v.imag();
  }
  const double n = static_cast<double>(y.size());
  CHECK(rr / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(ii / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(ri / n) < 0.01);
}

TEST_CASE("equalization inverts the noise-free channel") {
  const CtfGrid grid = make_grid(64, 4, 100e6, 26e9);
  CMatrix h(64, 4);
  for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = std::polar(1e-5 * (1 + i % 7), 0.3 * i);
  const auto x = generate_symbols(64, 0.01, 4);
  NoiseSpec off;
  off.disabled = true;
  const EstimatedCtf est = equalize(apply_channel_and_noise(h, x, off, 1), x, grid);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(est.h.data()[i] - h.data()[i]) <= 1e-12 * std::abs(h.data()[i]));
}

TEST_CASE("equalization rejects zero symbols and shape mismatches") {
  std::vector<cdouble> x(4, {1.0, 0.0});
  x[2] = {};
  CHECK_THROWS_AS(equalize(CMatrix(4, 2), x, CtfGrid{}), Error);
  CHECK_THROWS_AS(equalize(CMatrix(5, 2), std::vector<cdouble>(4, {1, 0}), CtfGrid{}), Error);
  CHECK_THROWS_AS(apply_channel_and_noise(CMatrix(5, 2), std::vector<cdouble>(4, {1, 0}), NoiseSpec{}, 1), Error);
}

TEST_CASE("SNR bookkeeping") {
  SUBCASE("full-scale processing gain is 23872, about 43.8 dB") {
    const CtfGrid grid = make_grid(2984, 8, 800e6, 26e9);
    const Ctf ctf{grid, CMatrix(2984, 8, {1.0, 0.0})};
    const NoiseSpec noise = noise_with_variance(1.0, 2984);
    const SnrReport r = snr_report(ctf, 1.0, noise);
    CHECK(r.gamma_com == doctest::Approx(1.0));
    CHECK(r.gamma_imag / r.gamma_com == doctest::Approx(23872.0));
    CHECK(linear_to_db(r.gamma_imag / r.gamma_com) == doctest::Approx(43.779).epsilon(1e-4));
  }
  SUBCASE("unit case and linearity in P_N") {
    const CtfGrid grid = make_grid(1, 1, 1e6, 26e9);
    const Ctf ctf{grid, CMatrix(1, 1, {1.0, 0.0})};
    const SnrReport r = snr_report(ctf, 1.0, noise_with_variance(1.0, 1));
    CHECK(r.gamma_com == doctest::Approx(1.0));
    CHECK(r.gamma_imag == doctest::Approx(1.0));
    const SnrReport r2 = snr_report(ctf, 1.0, noise_with_variance(2.0, 1));
    CHECK(r2.gamma_com == doctest::Approx(0.5));
    CHECK(r2.gamma_imag == doctest::Approx(0.5));
  }
}

TEST_CASE("thermal noise floor") {
  CHECK(thermal_noise_dbm(800e6) == doctest::Approx(-84.969).epsilon(1e-4));
  CHECK(thermal_noise_dbm(800e6, 8.0) == doctest::Approx(-76.969).epsilon(1e-4));
  CHECK(thermal_noise_dbm(1.0) == -174.0);
  CHECK_THROWS_AS(thermal_noise_dbm(0.0), Error);
}

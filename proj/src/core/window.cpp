#include "core/window.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "core/types.hpp"

namespace msense {

namespace {

// T_order(x) for any real x.
double chebyshev_poly(int order, double x) {
  if (x > 1.0) return std::cosh(order * std::acosh(x));
  if (x < -1.0) return ((order % 2 == 0) ? 1.0 : -1.0) * std::cosh(order * std::acosh(-x));
  return std::cos(order * std::acos(x));
}

std::vector<double> compute_chebyshev(int m, double attenuation_db) {
  const int order = m - 1;
  const double ripple = std::pow(10.0, attenuation_db / 20.0);
  const double beta = std::cosh(std::acosh(ripple) / order);

  std::vector<cdouble> p(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double x = beta * std::cos(kPi * k / m);
    p[static_cast<std::size_t>(k)] = chebyshev_poly(order, x);
    if (m % 2 == 0) p[static_cast<std::size_t>(k)] *= std::polar(1.0, kPi * k / m);
  }

  // Direct DFT; only computed once per (length, attenuation).
  std::vector<double> cos_table(static_cast<std::size_t>(m));
  std::vector<double> sin_table(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    cos_table[static_cast<std::size_t>(i)] = std::cos(2.0 * kPi * i / m);
    sin_table[static_cast<std::size_t>(i)] = std::sin(2.0 * kPi * i / m);
  }
  const int half = (m % 2 == 0) ? m / 2 + 1 : (m + 1) / 2;
  std::vector<double> spectrum(static_cast<std::size_t>(half));
  for (int j = 0; j < half; ++j) {
    double re = 0.0;
    std::size_t idx = 0;
    for (int k = 0; k < m; ++k) {
      const cdouble v = p[static_cast<std::size_t>(k)];
      // e^{-j 2pi k j / m}
      re += v.real() * cos_table[idx] + v.imag() * sin_table[idx];
      idx += static_cast<std::size_t>(j);
      if (idx >= static_cast<std::size_t>(m)) idx -= static_cast<std::size_t>(m);
    }
    spectrum[static_cast<std::size_t>(j)] = re;
  }

  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(m));
  if (m % 2 == 1) {
    for (int j = half - 1; j >= 1; --j) w.push_back(spectrum[static_cast<std::size_t>(j)]);
    for (int j = 0; j < half; ++j) w.push_back(spectrum[static_cast<std::size_t>(j)]);
  } else {
    for (int j = half - 1; j >= 1; --j) w.push_back(spectrum[static_cast<std::size_t>(j)]);
    for (int j = 1; j < half; ++j) w.push_back(spectrum[static_cast<std::size_t>(j)]);
  }
  const double peak = *std::max_element(w.begin(), w.end());
  for (auto& v : w) v /= peak;
  return w;
}

}  // namespace

double WindowSpec::effective_sidelobe_db() const {
  return kind == WindowKind::Rectangular ? 13.26 : sidelobe_attenuation_db;
}

std::vector<double> chebyshev_window(int length, double attenuation_db) {
  if (length < 2) throw_invalid("Chebyshev window needs length >= 2");
  if (!(attenuation_db > 0.0)) throw_invalid("Chebyshev attenuation must be positive");

  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::vector<double>> cache;
  const auto key = std::make_pair(length, attenuation_db);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto w = compute_chebyshev(length, attenuation_db);
  std::lock_guard lock(mutex);
  cache.emplace(key, w);
  return w;
}

WindowWeights make_window(const WindowSpec& spec, int length) {
  if (length < 1) throw_invalid("window length must be positive");
  WindowWeights out;
  if (spec.kind == WindowKind::Rectangular || length < 2) {
    out.w.assign(static_cast<std::size_t>(length), 1.0);
    out.mainlobe_halfwidth_bins = 1.0;
  } else {
    out.w = chebyshev_window(length, spec.sidelobe_attenuation_db);
    const double ripple = std::pow(10.0, spec.sidelobe_attenuation_db / 20.0);
    const double beta = std::cosh(std::acosh(ripple) / (length - 1));
    const double first_zero = std::cos(kPi / (2.0 * (length - 1)));
    out.mainlobe_halfwidth_bins = std::acos(first_zero / beta) / kPi * length;
  }
  out.coherent_gain = std::accumulate(out.w.begin(), out.w.end(), 0.0);
  out.power_gain = std::inner_product(out.w.begin(), out.w.end(), out.w.begin(), 0.0);
  return out;
}

WindowKind parse_window_kind(const std::string& name) {
  if (name == "chebyshev") return WindowKind::Chebyshev;
  if (name == "rectangular") return WindowKind::Rectangular;
  throw_invalid("unknown window kind '" + name + "'");
}

std::string to_string(WindowKind kind) {
  return kind == WindowKind::Chebyshev ? "chebyshev" : "rectangular";
}

}  // namespace msense

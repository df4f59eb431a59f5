#include <doctest.h>

#include "core/types.hpp"
#include "core/window.hpp"

using namespace msense;

namespace {

// Max sidelobe of |DFT(w)| relative to the mainlobe, in dB, from a dense direct DFT.
double max_sidelobe_db(const std::vector<double>& w, double mainlobe_halfwidth) {
  const int len = static_cast<int>(w.size());
  const int oversample = 128;
  const int n = len * oversample;
  double peak = 0.0;
  double side = 0.0;
  for (int f = 0; f <= n / 2; ++f) {
    cdouble acc{};
    for (int i = 0; i < len; ++i) acc += w[i] * std::polar(1.0, -2.0 * kPi * f * i / n);
    if (f == 0) peak = std::abs(acc);
    if (static_cast<double>(f) / oversample > mainlobe_halfwidth) side = std::max(side, std::abs(acc));
  }
  return 20.0 * std::log10(side / peak);
}

}  // namespace

TEST_CASE("Chebyshev weights match reference values") {
  // reference: scipy.signal.windows.chebwin
  const std::vector<double> ref8 = {0.2622164911915373, 0.5187470541275411, 0.8119600672627041, 1.0,
                                    1.0,                0.8119600672627041, 0.5187470541275411, 0.2622164911915373};
  const std::vector<double> ref7 = {0.26422539391104316, 0.5682694368151302, 0.8738136428793154, 1.0,
                                    0.8738136428793154,  0.5682694368151302, 0.26422539391104316};
  const std::vector<double> ref5 = {0.2410813631690104, 0.7264064846904162, 1.0, 0.7264064846904162,
                                    0.2410813631690104};
  const auto w8 = chebyshev_window(8, 30.0);
  const auto w7 = chebyshev_window(7, 30.0);
  const auto w5 = chebyshev_window(5, 40.0);
  REQUIRE(w8.size() == 8);
  REQUIRE(w7.size() == 7);
  REQUIRE(w5.size() == 5);
  for (int i = 0; i < 8; ++i) CHECK(w8[i] == doctest::Approx(ref8[i]).epsilon(1e-12));
  for (int i = 0; i < 7; ++i) CHECK(w7[i] == doctest::Approx(ref7[i]).epsilon(1e-12));
  for (int i = 0; i < 5; ++i) CHECK(w5[i] == doctest::Approx(ref5[i]).epsilon(1e-12));
}

TEST_CASE("Chebyshev sidelobes sit at the design level") {
  for (int len : {16, 64, 65}) {
    const WindowWeights ww = make_window({WindowKind::Chebyshev, 30.0}, len);
    CAPTURE(len);
    CHECK(max_sidelobe_db(ww.w, ww.mainlobe_halfwidth_bins) == doctest::Approx(-30.0).epsilon(0.5 / 30.0));
  }
  const WindowWeights w50 = make_window({WindowKind::Chebyshev, 50.0}, 64);
  CHECK(max_sidelobe_db(w50.w, w50.mainlobe_halfwidth_bins) == doctest::Approx(-50.0).epsilon(0.5 / 50.0));
}

TEST_CASE("Chebyshev weights are symmetric with unit peak") {
  for (int len : {2, 3, 8, 31, 2984}) {
    const auto w = chebyshev_window(len, 30.0);
    REQUIRE(static_cast<int>(w.size()) == len);
    double peak = 0.0;
    for (int i = 0; i < len; ++i) {
      CHECK(w[i] == doctest::Approx(w[len - 1 - i]).epsilon(1e-9));
      peak = std::max(peak, w[i]);
    }
    CHECK(peak == doctest::Approx(1.0));
  }
}

TEST_CASE("window errors and the rectangular case") {
  CHECK_THROWS_AS(chebyshev_window(1, 30.0), Error);
  CHECK_THROWS_AS(chebyshev_window(8, 0.0), Error);
  const WindowWeights rect = make_window({WindowKind::Rectangular, 0.0}, 12);
  CHECK(rect.w == std::vector<double>(12, 1.0));
  CHECK(rect.coherent_gain == 12.0);
  CHECK(rect.power_gain == 12.0);
  CHECK(rect.mainlobe_halfwidth_bins == 1.0);
  CHECK(WindowSpec{WindowKind::Rectangular, 0.0}.effective_sidelobe_db() == doctest::Approx(13.26));
}

TEST_CASE("window gains and mainlobe width") {
  const WindowWeights ww = make_window({WindowKind::Chebyshev, 30.0}, 8);
  double s = 0, s2 = 0;
  for (double v : ww.w) {
    s += v;
    s2 += v * v;
  }
  CHECK(ww.coherent_gain == doctest::Approx(s));
  CHECK(ww.power_gain == doctest::Approx(s2));
  // the Chebyshev mainlobe is wider than the rectangular one
  CHECK(ww.mainlobe_halfwidth_bins > 1.0);
  CHECK(ww.mainlobe_halfwidth_bins < 2.0);
  // first null of the DFT of the weights falls at the reported half width
  const int n = 8 * 4096;
  auto mag = [&](double f) {
    cdouble acc{};
    for (int i = 0; i < 8; ++i) acc += ww.w[i] * std::polar(1.0, -2.0 * kPi * f * i / 8.0);
    return std::abs(acc);
  };
  double best = 1e9, at = 0.0;
  for (int i = 1; i < n / 4; ++i) {
    const double f = static_cast<double>(i) / 4096.0;
    if (f > 2.5) break;
    if (mag(f) < best) {
      best = mag(f);
      at = f;
    }
  }
  CHECK(at == doctest::Approx(ww.mainlobe_halfwidth_bins).epsilon(1e-3));
}

TEST_CASE("window kind names") {
  CHECK(parse_window_kind("chebyshev") == WindowKind::Chebyshev);
  CHECK(parse_window_kind("rectangular") == WindowKind::Rectangular);
  CHECK(to_string(WindowKind::Chebyshev) == "chebyshev");
  CHECK_THROWS_AS(parse_window_kind("hann"), Error);
}

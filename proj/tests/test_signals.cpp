#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "dertrack/signals.hpp"

using namespace dertrack;

TEST_CASE("linear samples are reproduced exactly, with exact slope") {
  SampledSeries s;
  for (int k = 0; k <= 10; ++k) {
    s.t.push_back(0.5 * k);
    s.value.push_back(2.0 + 3.0 * 0.5 * k);
  }
  const Interpolant f(s);
  for (double t = 0.0; t <= 5.0; t += 0.07) {
    const auto e = f(t);
    CHECK(e.value == doctest::Approx(2.0 + 3.0 * t).epsilon(1e-12));
    CHECK(e.derivative == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("smooth signal sampled at 1 s interpolates to 1e-3") {
  SampledSeries s;
  for (int k = 0; k <= 60; ++k) {
    s.t.push_back(static_cast<double>(k));
    s.value.push_back(std::sin(0.1 * k));
  }
  const Interpolant f(s);
  double max_v = 0.0, max_d = 0.0;
  for (double t = 0.0; t <= 60.0; t += 0.01) {
    const auto e = f(t);
    max_v = std::max(max_v, std::abs(e.value - std::sin(0.1 * t)));
    max_d = std::max(max_d, std::abs(e.derivative - 0.1 * std::cos(0.1 * t)));
  }
  CHECK(max_v < 1e-3);
  CHECK(max_d < 1e-2);
}

TEST_CASE("monotone data stays monotone and inside the sample range") {
  SampledSeries s;
  s.t = {0, 1, 2, 3, 4, 5};
  s.value = {0.0, 0.0, 1.0, 3.0, 3.2, 3.2};
  const Interpolant f(s);
  double prev = f(0.0).value;
  for (double t = 0.005; t <= 5.0; t += 0.005) {
    const auto e = f(t);
    CHECK(e.value >= prev - 1e-12);
    CHECK(e.value >= -1e-12);
    CHECK(e.value <= 3.2 + 1e-12);
    CHECK(e.derivative >= -1e-9);
    prev = e.value;
  }
}

TEST_CASE("evaluation outside the span clamps flat") {
  SampledSeries s;
  s.t = {1.0, 2.0, 3.0};
  s.value = {4.0, 5.0, 7.0};
  const Interpolant f(s);
  CHECK(f(0.0).value == doctest::Approx(4.0));
  CHECK(f(0.0).derivative == doctest::Approx(0.0));
  CHECK(f(10.0).value == doctest::Approx(7.0));
  CHECK(f(10.0).derivative == doctest::Approx(0.0));
}

TEST_CASE("series csv round trip") {
  SampledSeries s;
  s.t = {0.0, 1.0, 2.5};
  s.value = {0.125, -3.75, 19.0625};
  const std::string path = "signals_roundtrip.csv";
  write_series_csv(path, s);
  const SampledSeries back = read_series_csv(path);
  REQUIRE(back.t.size() == s.t.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    CHECK(back.t[i] == s.t[i]);
    CHECK(back.value[i] == s.value[i]);
  }
  std::remove(path.c_str());
}

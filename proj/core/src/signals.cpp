#include "dertrack/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dertrack {

namespace {

// Knot slopes: three-point finite differences, then limited so each cubic
// piece stays monotone wherever the data is (Fritsch-Carlson sufficient
// region |m| <= 3 |secant|, slope zeroed at local extrema).
std::vector<double> limited_slopes(const std::vector<double>& t,
                                   const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> m(n, 0.0);
  if (n == 2) {
    m[0] = m[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return m;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (t[i + 1] <= t[i]) throw TooFewSamples("sample times must increase");
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
  }
  {
    // One-sided three-point ends (exact for quadratics, so linear data
    // reproduces exactly).
    const double h0 = t[1] - t[0], h1 = t[2] - t[1];
    m[0] = ((2.0 * h0 + h1) * (y[1] - y[0]) / h0 - h0 * (y[2] - y[1]) / h1) /
           (h0 + h1);
    const double hn = t[n - 1] - t[n - 2], hm = t[n - 2] - t[n - 3];
    m[n - 1] = ((2.0 * hn + hm) * (y[n - 1] - y[n - 2]) / hn -
                hn * (y[n - 2] - y[n - 3]) / hm) /
               (hn + hm);
  }
  auto secant = [&](std::size_t i) { return (y[i + 1] - y[i]) / (t[i + 1] - t[i]); };
  for (std::size_t i = 0; i < n; ++i) {
    const double dl = i > 0 ? secant(i - 1) : secant(i);
    const double dr = i + 1 < n ? secant(i) : secant(i - 1);
    if (dl * dr <= 0.0 && i > 0 && i + 1 < n) {
      m[i] = 0.0;  // local extremum in the data
      continue;
    }
    const double ref = i + 1 < n ? dr : dl;
    if (m[i] * ref < 0.0) {
      m[i] = 0.0;
    } else {
      const double cap = 3.0 * std::min(std::abs(dl), std::abs(dr));
      m[i] = std::copysign(std::min(std::abs(m[i]), cap), m[i]);
    }
  }
  return m;
}

}  // namespace

Interpolant::Interpolant(SampledSeries series)
    : t_(std::move(series.t)), y_(std::move(series.value)) {
  if (t_.size() != y_.size()) {
    throw DimensionMismatch("sample time/value arrays differ in length");
  }
  if (t_.size() < 2) {
    throw TooFewSamples("interpolation needs at least two samples");
  }
  slope_ = limited_slopes(t_, y_);
}

Interpolant::Eval Interpolant::operator()(double t) const {
  // The span boundaries themselves report the knot slopes; only genuine
  // extrapolation is clamped flat.
  if (t == t_.front()) return {y_.front(), slope_.front()};
  if (t == t_.back()) return {y_.back(), slope_.back()};
  if (t < t_.front()) return {y_.front(), 0.0};
  if (t > t_.back()) return {y_.back(), 0.0};
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  Eval e;
  e.value = h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] +
            h11 * h * slope_[i + 1];
  const double d00 = (6 * s2 - 6 * s) / h;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = (-6 * s2 + 6 * s) / h;
  const double d11 = 3 * s2 - 2 * s;
  e.derivative = d00 * y_[i] + d10 * slope_[i] + d01 * y_[i + 1] +
                 d11 * slope_[i + 1];
  return e;
}

Interpolant hermite_fit(SampledSeries series) {
  return Interpolant(std::move(series));
}

SampledSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioLoadError("cannot open profile: " + path);
  SampledSeries s;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find("t_s") != std::string::npos) continue;  // header
    }
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      throw ScenarioLoadError("malformed profile row in " + path);
    }
    try {
      s.t.push_back(std::stod(a));
      s.value.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw ScenarioLoadError("non-numeric profile row in " + path);
    }
  }
  if (s.t.size() < 2) throw TooFewSamples("profile too short: " + path);
  return s;
}

void write_series_csv(const std::string& path, const SampledSeries& series) {
  std::ofstream out(path);
  if (!out) throw ScenarioLoadError("cannot write profile: " + path);
  out << "t_s,value\n";
  char buf[64];
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17e,%.17e\n", series.t[i],
                  series.value[i]);
    out << buf;
  }
}

}  // namespace dertrack

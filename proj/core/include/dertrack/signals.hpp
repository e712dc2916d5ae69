#pragma once

#include <string>
#include <vector>

#include "dertrack/errors.hpp"

namespace dertrack {

struct SampledSeries {
  std::vector<double> t;
  std::vector<double> value;
};

// C1 piecewise-cubic Hermite interpolant with monotonicity-limited knot
// slopes (three-point finite differences, clamped to the Fritsch-Carlson
// region). Evaluation outside the sample span clamps to the end value with
// zero derivative, so extrapolated signals are flat.
class Interpolant {
 public:
  Interpolant() = default;
  explicit Interpolant(SampledSeries series);

  struct Eval {
    double value = 0.0;
    double derivative = 0.0;
  };
  Eval operator()(double t) const;

  double t_begin() const { return t_.empty() ? 0.0 : t_.front(); }
  double t_end() const { return t_.empty() ? 0.0 : t_.back(); }
  bool empty() const { return t_.empty(); }

 private:
  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

Interpolant hermite_fit(SampledSeries series);

// `t_s,value` CSV with a header row.
SampledSeries read_series_csv(const std::string& path);
void write_series_csv(const std::string& path, const SampledSeries& series);

}  // namespace dertrack

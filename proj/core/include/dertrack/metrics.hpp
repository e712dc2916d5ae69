#pragma once

#include <optional>

#include "dertrack/trajectory.hpp"

namespace dertrack {

struct TrackingThresholds {
  double err_u = 1e-2;  // ||u - u*||_2 band
  double err_f = 1e-3;  // |f - f*| band
};

struct TrackingMetrics {
  std::vector<double> t;
  std::vector<double> err_u;
  std::vector<double> err_f;
  // First instant after which both error series stay inside the band for the
  // rest of the horizon; empty when they never settle.
  std::optional<double> time_to_track;

  double mean_err_u(double from_t = 0.0) const;
  double max_err_u(double from_t = 0.0) const;
  double mean_err_f(double from_t = 0.0) const;
  double max_err_f(double from_t = 0.0) const;
};

// Both records must share the time grid (1e-9 tolerance); the reference run
// supplies u_ref/objective_ref on its rows.
TrackingMetrics compute_metrics(const TrajectoryRecord& tracked,
                                const TrajectoryRecord& reference,
                                const TrackingThresholds& thresholds = {});

// Same, for a record whose own rows carry the reference columns.
TrackingMetrics compute_metrics(const TrajectoryRecord& with_reference,
                                const TrackingThresholds& thresholds = {});

}  // namespace dertrack

#include "dertrack/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dertrack/errors.hpp"

namespace dertrack {

namespace {

double reduce(const std::vector<double>& t, const std::vector<double>& v,
              double from_t, bool want_max) {
  double acc = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] + 1e-12 < from_t) continue;
    if (want_max) {
      acc = std::max(acc, v[i]);
    } else {
      acc += v[i];
    }
    ++count;
  }
  if (count == 0) return 0.0;
  return want_max ? acc : acc / static_cast<double>(count);
}

}  // namespace

double TrackingMetrics::mean_err_u(double from_t) const {
  return reduce(t, err_u, from_t, false);
}
double TrackingMetrics::max_err_u(double from_t) const {
  return reduce(t, err_u, from_t, true);
}
double TrackingMetrics::mean_err_f(double from_t) const {
  return reduce(t, err_f, from_t, false);
}
double TrackingMetrics::max_err_f(double from_t) const {
  return reduce(t, err_f, from_t, true);
}

TrackingMetrics compute_metrics(const TrajectoryRecord& tracked,
                                const TrajectoryRecord& reference,
                                const TrackingThresholds& thresholds) {
  if (tracked.rows.size() != reference.rows.size()) {
    throw MisalignedTrajectories("row counts differ");
  }
  TrackingMetrics m;
  m.t.reserve(tracked.rows.size());
  for (std::size_t i = 0; i < tracked.rows.size(); ++i) {
    const TrajectoryRow& a = tracked.rows[i];
    const TrajectoryRow& b = reference.rows[i];
    if (std::abs(a.t - b.t) > 1e-9) {
      throw MisalignedTrajectories("time grids differ at row " +
                                   std::to_string(i));
    }
    m.t.push_back(a.t);
    m.err_u.push_back((a.u - b.u).norm());
    m.err_f.push_back(std::abs(a.objective - b.objective));
  }
  // Scan backwards for the last out-of-band row.
  std::size_t settle = 0;
  for (std::size_t i = m.t.size(); i-- > 0;) {
    if (m.err_u[i] > thresholds.err_u || m.err_f[i] > thresholds.err_f) {
      settle = i + 1;
      break;
    }
  }
  if (settle < m.t.size()) m.time_to_track = m.t[settle];
  return m;
}

TrackingMetrics compute_metrics(const TrajectoryRecord& with_reference,
                                const TrackingThresholds& thresholds) {
  TrajectoryRecord ref;
  ref.n = with_reference.n;
  ref.tau = with_reference.tau;
  ref.rows.reserve(with_reference.rows.size());
  for (const TrajectoryRow& row : with_reference.rows) {
    if (!row.has_reference) {
      throw MisalignedTrajectories("row lacks reference columns");
    }
    TrajectoryRow r;
    r.t = row.t;
    r.u = row.u_ref;
    r.objective = row.objective_ref;
    ref.rows.push_back(std::move(r));
  }
  return compute_metrics(with_reference, ref, thresholds);
}

}  // namespace dertrack

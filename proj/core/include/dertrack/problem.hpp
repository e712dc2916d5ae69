#pragma once

#include <Eigen/Dense>
#include <span>

#include "dertrack/devices.hpp"
#include "dertrack/feeder.hpp"

namespace dertrack {

// min  u' (K/2) u + d' u + (gamma/2) ||V - v_nom 1||^2,   u = [P_g; Q_g]
// s.t. u_min(t) <= u <= u_max(t),  v_min <= V <= v_max,
//      V = 1 + D (u + w(t)),  D = [A B].
struct QpObjective {
  Eigen::VectorXd k_diag;  // 2n, strictly positive
  Eigen::VectorXd d;       // 2n
  Eigen::VectorXd d_dot;
  double gamma = 1.0;
  double v_nom = 1.0;
};

struct TimeVaryingQp {
  int n = 0;
  QpObjective obj;
  Eigen::MatrixXd d_sens;  // n x 2n
  Eigen::VectorXd u_min, u_max, du_min, du_max;
  Eigen::VectorXd w, w_dot;  // 2n net non-DER injections (loads negative)
  double v_min = 0.95, v_max = 1.05;

  int constraint_count() const { return 6 * n; }
  Eigen::VectorXd voltage_at(const Eigen::VectorXd& u) const {
    return (d_sens * (u + w)).array() + 1.0;
  }
};

struct QpSettings {
  double gamma = 1.0;
  double v_nom = 1.0;
  double v_min = 0.95;
  double v_max = 1.05;
  double default_c_p = 3.0;  // cost used for nodes without a device entry
  double default_c_q = 1.0;
  double eps_box = 1e-6;  // half-width given to degenerate box faces
};

// Per-node exogenous signals at one instant. Loads are positive consumption
// magnitudes and enter w with a negative sign.
struct NodalSignals {
  Eigen::VectorXd load_p, load_q;          // n
  Eigen::VectorXd load_p_dot, load_q_dot;  // n
};

// Renewable targets track availability (P_tar = P_av); storage targets zero.
// Degenerate box faces (width < 2 eps_box) are widened to +-eps_box around
// their midpoint so the barrier interior is never empty.
TimeVaryingQp assemble_qp(std::span<const DeviceSpec> devices,
                          const SensitivityModel& sens,
                          const NodalSignals& loads,
                          std::span<const DeviceSignal> der_signals,
                          std::span<const double> soc,
                          const QpSettings& settings);

double objective_value(const TimeVaryingQp& qp, const Eigen::VectorXd& u);
Eigen::VectorXd objective_gradient(const TimeVaryingQp& qp,
                                   const Eigen::VectorXd& u);

// Stacked f_i(u) <= 0 values in the fixed ordering
// [u_min - u (2n); u - u_max (2n); v_min - V (n); V - v_max (n)].
Eigen::VectorXd constraint_values(const TimeVaryingQp& qp,
                                  const Eigen::VectorXd& u);

// Strictly feasible default start: box midpoint.
Eigen::VectorXd box_midpoint(const TimeVaryingQp& qp);

}  // namespace dertrack

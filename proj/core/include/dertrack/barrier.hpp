#pragma once

#include <Eigen/Dense>

#include "dertrack/problem.hpp"

namespace dertrack {

// Relaxed log-barrier surrogate
//   Phi(u, s, c, t) = f(u,t) - (1/c) sum_i ln(s - f_i(u,t)).
// s relaxes the constraints (so an initially infeasible state is in the
// domain), c weights the barrier. Both follow exponential schedules with
// saturation; their derivatives feed the prediction terms of the dynamics.
struct BarrierSchedule {
  double s0 = 2.0;
  double lambda_s = 10.0;
  double s_min = 1e-9;
  double c0 = 1.0;
  double lambda_c = 10.0;
  double c_max = 1e12;
  // Discrete events re-soften the barrier to at most this weight (a
  // saturated barrier cannot absorb a constraint set that jumps); c then
  // regrows at lambda_c, re-entering the tracking band within ~0.3 s.
  double c_event = 1e5;

  double s_at(double t) const;
  double c_at(double t) const;
  // Rates of the saturated schedules given current values.
  double s_rate(double s) const { return s > s_min ? -lambda_s * s : 0.0; }
  double c_rate(double c) const { return c < c_max ? lambda_c * c : 0.0; }
  // Exact exponential advance over dt with saturation.
  double s_advance(double s, double dt) const;
  double c_advance(double c, double dt) const;
};

// First/second derivative blocks of Phi at (u, s, c, t). Slack vectors keep
// the constraint ordering of constraint_values: h_lo/h_hi the box faces,
// g_lo/g_hi the voltage faces.
struct BarrierBlocks {
  Eigen::VectorXd grad_u;   // 2n
  Eigen::MatrixXd hess_uu;  // 2n x 2n, SPD
  Eigen::VectorXd grad_us;  // d/ds of grad_u
  Eigen::VectorXd grad_uc;  // d/dc of grad_u
  Eigen::VectorXd grad_ut;  // explicit time partial of grad_u
  Eigen::VectorXd h_lo, h_hi;  // 2n
  Eigen::VectorXd g_lo, g_hi;  // n
};

// Throws BarrierDomainViolation (with the stacked constraint index) if any
// slack is non-positive.
double eval_phi(const TimeVaryingQp& qp, const Eigen::VectorXd& u, double s,
                double c);
BarrierBlocks eval_blocks(const TimeVaryingQp& qp, const Eigen::VectorXd& u,
                          double s, double c);

}  // namespace dertrack

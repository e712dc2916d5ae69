#pragma once

#include "dertrack/dynamics.hpp"
#include "dertrack/trajectory.hpp"

namespace dertrack {

// Iterative references that sample the problem at a fixed period and hold
// their setpoint between samples. Both emit rows on the fine tau grid so
// they align with the continuous run for metric comparison; the objective
// column is evaluated on the provider's model.

// Projected primal-dual iteration on the Lagrangian with the voltage
// constraints dualized and the box handled by projection. Gains frozen from
// a grid search on the ramp scenario: largest beta_p stable on the 33-bus
// (beta_p * L < 2 for L ~ 17), iteration count low enough that the sampled
// optimum is chased, not reached.
struct PrimalDualGains {
  double beta_p = 0.02;
  double beta_d = 0.5;
  int iterations_per_sample = 8;
};

TrajectoryRecord primal_dual_track(const QpProvider& provider, double horizon,
                                   double tau, double sample_period,
                                   const PrimalDualGains& gains);

// Sampled prediction-correction: one Euler prediction over the sample period
// followed by damped Newton corrections on the sampled barrier problem with
// a fixed barrier weight (no relaxation; the iterate stays strictly
// feasible, enforced by backtracking).
struct DiscretePcConfig {
  int correction_steps = 3;
  double barrier_c = 1e7;
  int max_backtracks = 40;
};

TrajectoryRecord discrete_pc_track(const QpProvider& provider, double horizon,
                                   double tau, double sample_period,
                                   const DiscretePcConfig& cfg);

}  // namespace dertrack

#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dertrack/barrier.hpp"

namespace dertrack {

// State of the continuous tracking system. s and c are carried as state so
// events can re-initialize the relaxation without breaking the schedule
// (they then decay/grow at the configured rates from the new value).
struct PcState {
  Eigen::VectorXd u;
  double t = 0.0;
  double s = 0.0;
  double c = 1.0;
};

struct IntegratorConfig {
  double tau = 0.02;      // outer step (s)
  int substeps = 4;       // explicit Euler substeps per outer step
  double alpha = 100.0;   // correction gain
  int max_halvings = 20;  // per substep, on interiority violation
  double cond_cap = 1e12;
  double slack_margin = 1e-3;  // added when s must be lifted above max f_i
};

struct StepStats {
  long factorizations = 0;
  long substeps_executed = 0;  // accepted sub-advances (halves count)
  long halvings = 0;
};

// Smallest relaxation that puts u in the barrier domain with a margin,
// never below the schedule value.
double init_slack(const TimeVaryingQp& qp, const Eigen::VectorXd& u,
                  double schedule_s, double margin);

// du/dt = -H^{-1} (alpha g + g_s sdot + g_c cdot + g_t). One SPD
// factorization per call; throws IllConditionedHessian when the factor's
// diagonal spread exceeds cond_cap.
Eigen::VectorXd pc_rhs(const BarrierBlocks& blocks, double s_dot, double c_dot,
                       double alpha, double cond_cap, StepStats* stats);

using QpProvider = std::function<TimeVaryingQp(double t)>;

// Advances one outer step of length cfg.tau. Each substep re-assembles the
// problem at the current time, takes an explicit Euler step and verifies
// interiority at the new point; a violating sub-advance is halved and
// retried. Throws StepRejected when halving bottoms out.
PcState step(const PcState& state, const QpProvider& provider,
             const BarrierSchedule& schedule, const IntegratorConfig& cfg,
             StepStats* stats = nullptr);

}  // namespace dertrack

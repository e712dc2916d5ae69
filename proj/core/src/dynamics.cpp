#include "dertrack/dynamics.hpp"

#include <Eigen/Cholesky>

namespace dertrack {

double init_slack(const TimeVaryingQp& qp, const Eigen::VectorXd& u,
                  double schedule_s, double margin) {
  const double worst = constraint_values(qp, u).maxCoeff();
  return std::max(schedule_s, worst + margin);
}

Eigen::VectorXd pc_rhs(const BarrierBlocks& blocks, double s_dot, double c_dot,
                       double alpha, double cond_cap, StepStats* stats) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(blocks.hess_uu);
  if (stats) ++stats->factorizations;
  if (ldlt.info() != Eigen::Success) {
    throw IllConditionedHessian("SPD factorization failed");
  }
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmin = d.minCoeff();
  if (dmin <= 0.0 || d.maxCoeff() / dmin > cond_cap) {
    throw IllConditionedHessian(
        "curvature spread exceeds the configured conditioning cap");
  }
  const Eigen::VectorXd forcing = alpha * blocks.grad_u +
                                  blocks.grad_us * s_dot +
                                  blocks.grad_uc * c_dot + blocks.grad_ut;
  return -ldlt.solve(forcing);
}

namespace {

bool interior(const TimeVaryingQp& qp, const Eigen::VectorXd& u, double s) {
  return (constraint_values(qp, u).array() < s).all();
}

}  // namespace

PcState step(const PcState& state, const QpProvider& provider,
             const BarrierSchedule& schedule, const IntegratorConfig& cfg,
             StepStats* stats) {
  PcState cur = state;
  const double h_nominal = cfg.tau / cfg.substeps;
  for (int sub = 0; sub < cfg.substeps; ++sub) {
    double remaining = h_nominal;
    double h = h_nominal;
    int halvings = 0;
    while (remaining > 0.0) {
      h = std::min(h, remaining);
      const TimeVaryingQp qp = provider(cur.t);
      const BarrierBlocks blocks = eval_blocks(qp, cur.u, cur.s, cur.c);
      const Eigen::VectorXd du =
          pc_rhs(blocks, schedule.s_rate(cur.s), schedule.c_rate(cur.c),
                 cfg.alpha, cfg.cond_cap, stats);

      // The vector field does not depend on h, so halving only re-tests the
      // Euler trial point; one factorization per accepted sub-advance.
      for (;;) {
        const double t_next = cur.t + h;
        const double s_next = schedule.s_advance(cur.s, h);
        const Eigen::VectorXd u_next = cur.u + h * du;
        if (interior(provider(t_next), u_next, s_next)) {
          cur.u = u_next;
          cur.t = t_next;
          cur.s = s_next;
          cur.c = schedule.c_advance(cur.c, h);
          remaining -= h;
          if (stats) ++stats->substeps_executed;
          break;
        }
        if (++halvings > cfg.max_halvings) {
          throw StepRejected("substep halving exhausted at t = " +
                             std::to_string(cur.t));
        }
        if (stats) ++stats->halvings;
        h *= 0.5;
      }
    }
  }
  // Land exactly on the grid; accumulated h round-off stays below 1e-12.
  cur.t = state.t + cfg.tau;
  return cur;
}

}  // namespace dertrack

#include "dertrack/baselines.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace dertrack {

namespace {

long grid_rows(double horizon, double tau) {
  return std::lround(horizon / tau) + 1;
}

// Emits the held setpoint on every tau grid point in [t_from, t_to).
void hold(TrajectoryRecord& rec, const QpProvider& provider,
          const Eigen::VectorXd& u, double t_from, double t_to, double tau,
          long total_rows) {
  for (long k = std::lround(t_from / tau); k < total_rows; ++k) {
    const double t = static_cast<double>(k) * tau;
    if (t >= t_to - 1e-9) break;
    const TimeVaryingQp qp = provider(t);
    TrajectoryRow row;
    row.t = t;
    row.u = u;
    row.v = qp.voltage_at(u);
    row.objective = objective_value(qp, u);
    rec.rows.push_back(std::move(row));
  }
}

}  // namespace

TrajectoryRecord primal_dual_track(const QpProvider& provider, double horizon,
                                   double tau, double sample_period,
                                   const PrimalDualGains& gains) {
  const long rows = grid_rows(horizon, tau);
  TrajectoryRecord rec;
  rec.tau = tau;

  TimeVaryingQp qp = provider(0.0);
  rec.n = qp.n;
  const int n = qp.n;
  Eigen::VectorXd u = box_midpoint(qp);
  Eigen::VectorXd lam_lo = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd lam_hi = Eigen::VectorXd::Zero(n);

  for (double ts = 0.0; ts < horizon + 0.5 * sample_period;
       ts += sample_period) {
    qp = provider(std::min(ts, horizon));
    for (int it = 0; it < gains.iterations_per_sample; ++it) {
      const Eigen::VectorXd grad = objective_gradient(qp, u) +
                                   qp.d_sens.transpose() * (lam_hi - lam_lo);
      u = (u - gains.beta_p * grad).cwiseMax(qp.u_min).cwiseMin(qp.u_max);
      const Eigen::VectorXd v = qp.voltage_at(u);
      lam_lo = (lam_lo + gains.beta_d * (Eigen::VectorXd::Constant(n, qp.v_min) - v))
                   .cwiseMax(0.0);
      lam_hi = (lam_hi + gains.beta_d * (v - Eigen::VectorXd::Constant(n, qp.v_max)))
                   .cwiseMax(0.0);
    }
    hold(rec, provider, u, ts, ts + sample_period, tau, rows);
  }
  if (static_cast<long>(rec.rows.size()) != rows) {
    throw MisalignedTrajectories("sampled run missed grid points");
  }
  return rec;
}

namespace {

// Pulls an iterate into the strict interior of the sampled constraint set.
// A falling availability cap can strand the held setpoint outside the new
// box, so box components clamp with a small margin first; if voltage rows
// still fail, bisect toward the box midpoint. Returns false when even that
// fails (the sampled baseline then holds the previous setpoint unchanged;
// it deliberately carries no phase-1 solve).
bool restore_interior(const TimeVaryingQp& qp, Eigen::VectorXd& u) {
  const Eigen::VectorXd margin =
      1e-9 * (qp.u_max - qp.u_min).cwiseMax(1e-3);
  u = u.cwiseMax(qp.u_min + margin).cwiseMin(qp.u_max - margin);
  if ((constraint_values(qp, u).array() < 0.0).all()) return true;
  const Eigen::VectorXd mid = box_midpoint(qp);
  for (int b = 0; b < 60; ++b) {
    u = 0.5 * (u + mid);
    if ((constraint_values(qp, u).array() < 0.0).all()) return true;
  }
  return false;
}

// Damped Newton step on Phi(., s=0, c) at fixed time; backtracks until the
// iterate is strictly feasible and Phi decreased.
void newton_correct(const TimeVaryingQp& qp, Eigen::VectorXd& u, double c,
                    int steps, int max_backtracks) {
  for (int k = 0; k < steps; ++k) {
    const BarrierBlocks blocks = eval_blocks(qp, u, 0.0, c);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(blocks.hess_uu);
    const Eigen::VectorXd dir = -ldlt.solve(blocks.grad_u);
    const double phi0 = eval_phi(qp, u, 0.0, c);
    double beta = 1.0;
    for (int b = 0; b <= max_backtracks; ++b) {
      const Eigen::VectorXd trial = u + beta * dir;
      try {
        if (eval_phi(qp, trial, 0.0, c) < phi0 + 1e-14) {
          u = trial;
          break;
        }
      } catch (const BarrierDomainViolation&) {
        // shrink and retry
      }
      beta *= 0.5;
      if (b == max_backtracks) return;  // stuck; keep current iterate
    }
  }
}

}  // namespace

TrajectoryRecord discrete_pc_track(const QpProvider& provider, double horizon,
                                   double tau, double sample_period,
                                   const DiscretePcConfig& cfg) {
  const long rows = grid_rows(horizon, tau);
  TrajectoryRecord rec;
  rec.tau = tau;

  TimeVaryingQp qp = provider(0.0);
  rec.n = qp.n;
  Eigen::VectorXd u = box_midpoint(qp);

  bool first = true;
  for (double ts = 0.0; ts < horizon + 0.5 * sample_period;
       ts += sample_period) {
    const double t_now = std::min(ts, horizon);
    if (!first) {
      // One Euler prediction over the elapsed sample period, using the
      // blocks at the previous sample where the iterate currently lives.
      const TimeVaryingQp qp_prev = provider(t_now - sample_period);
      try {
        const BarrierBlocks blocks = eval_blocks(qp_prev, u, 0.0, cfg.barrier_c);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(blocks.hess_uu);
        Eigen::VectorXd trial =
            u - sample_period * ldlt.solve(blocks.grad_ut);
        // Keep the prediction strictly feasible for the new sample.
        const TimeVaryingQp qp_now = provider(t_now);
        double beta = 1.0;
        for (int b = 0; b < cfg.max_backtracks; ++b) {
          const Eigen::VectorXd cand = u + beta * (trial - u);
          if ((constraint_values(qp_now, cand).array() < 0.0).all()) {
            u = cand;
            break;
          }
          beta *= 0.5;
        }
      } catch (const BarrierDomainViolation&) {
        // prediction skipped; corrections recover
      }
    }
    first = false;
    qp = provider(t_now);
    if (restore_interior(qp, u)) {
      newton_correct(qp, u, cfg.barrier_c, cfg.correction_steps,
                     cfg.max_backtracks);
    }
    hold(rec, provider, u, t_now, t_now + sample_period, tau, rows);
  }
  if (static_cast<long>(rec.rows.size()) != rows) {
    throw MisalignedTrajectories("sampled run missed grid points");
  }
  return rec;
}

}  // namespace dertrack

#include "dertrack/barrier.hpp"

#include <cmath>

namespace dertrack {

double BarrierSchedule::s_at(double t) const {
  return std::max(s0 * std::exp(-lambda_s * t), s_min);
}

double BarrierSchedule::c_at(double t) const {
  return std::min(c0 * std::exp(lambda_c * t), c_max);
}

double BarrierSchedule::s_advance(double s, double dt) const {
  return std::max(s * std::exp(-lambda_s * dt), s_min);
}

double BarrierSchedule::c_advance(double c, double dt) const {
  return std::min(c * std::exp(lambda_c * dt), c_max);
}

namespace {

struct Slacks {
  Eigen::VectorXd h_lo, h_hi;  // box: s - (u_min - u), s - (u - u_max)
  Eigen::VectorXd g_lo, g_hi;  // voltage
  Eigen::VectorXd v;
};

Slacks compute_slacks(const TimeVaryingQp& qp, const Eigen::VectorXd& u,
                      double s) {
  const int n = qp.n;
  if (u.size() != 2 * n) throw DimensionMismatch("setpoint size mismatch");
  Slacks sl;
  sl.v = qp.voltage_at(u);
  sl.h_lo = (u - qp.u_min).array() + s;
  sl.h_hi = (qp.u_max - u).array() + s;
  sl.g_lo = (sl.v.array() - qp.v_min) + s;
  sl.g_hi = (qp.v_max - sl.v.array()) + s;
  auto check = [](const Eigen::VectorXd& h, int offset) {
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      if (!(h[i] > 0.0)) {
        throw BarrierDomainViolation(
            "barrier slack non-positive at constraint " +
                std::to_string(offset + i),
            offset + static_cast<int>(i));
      }
    }
  };
  check(sl.h_lo, 0);
  check(sl.h_hi, 2 * n);
  check(sl.g_lo, 4 * n);
  check(sl.g_hi, 5 * n);
  return sl;
}

}  // namespace

double eval_phi(const TimeVaryingQp& qp, const Eigen::VectorXd& u, double s,
                double c) {
  const Slacks sl = compute_slacks(qp, u, s);
  const double logs = sl.h_lo.array().log().sum() +
                      sl.h_hi.array().log().sum() +
                      sl.g_lo.array().log().sum() + sl.g_hi.array().log().sum();
  return objective_value(qp, u) - logs / c;
}

BarrierBlocks eval_blocks(const TimeVaryingQp& qp, const Eigen::VectorXd& u,
                          double s, double c) {
  Slacks sl = compute_slacks(qp, u, s);
  const Eigen::MatrixXd& D = qp.d_sens;

  const Eigen::ArrayXd inv_hlo = sl.h_lo.array().inverse();
  const Eigen::ArrayXd inv_hhi = sl.h_hi.array().inverse();
  const Eigen::ArrayXd inv_glo = sl.g_lo.array().inverse();
  const Eigen::ArrayXd inv_ghi = sl.g_hi.array().inverse();
  const Eigen::ArrayXd inv_hlo2 = inv_hlo.square();
  const Eigen::ArrayXd inv_hhi2 = inv_hhi.square();
  const Eigen::ArrayXd inv_glo2 = inv_glo.square();
  const Eigen::ArrayXd inv_ghi2 = inv_ghi.square();

  BarrierBlocks out;
  out.h_lo = std::move(sl.h_lo);
  out.h_hi = std::move(sl.h_hi);
  out.g_lo = std::move(sl.g_lo);
  out.g_hi = std::move(sl.g_hi);

  // Box contributions enter diagonally; voltage contributions through D'.
  const Eigen::VectorXd k_sum =
      (inv_hlo - inv_hhi).matrix() +
      D.transpose() * (inv_glo - inv_ghi).matrix();

  const Eigen::VectorXd dv = sl.v.array() - qp.obj.v_nom;
  out.grad_u = qp.obj.k_diag.cwiseProduct(u) + qp.obj.d +
               qp.obj.gamma * (D.transpose() * dv) - k_sum / c;

  out.hess_uu = qp.obj.gamma * (D.transpose() * D);
  out.hess_uu +=
      (D.transpose() * (inv_glo2 + inv_ghi2).matrix().asDiagonal() * D) / c;
  out.hess_uu.diagonal() += qp.obj.k_diag;
  out.hess_uu.diagonal() += ((inv_hlo2 + inv_hhi2) / c).matrix();

  out.grad_us = ((inv_hlo2 - inv_hhi2).matrix() +
                 D.transpose() * (inv_glo2 - inv_ghi2).matrix()) /
                c;
  out.grad_uc = k_sum / (c * c);

  // Explicit time partial: moving bounds and moving exogenous injections.
  const Eigen::VectorXd dv_dt = D * qp.w_dot;
  out.grad_ut = qp.obj.d_dot + qp.obj.gamma * (D.transpose() * dv_dt) -
                (qp.du_min.array() * inv_hlo2).matrix() / c -
                (qp.du_max.array() * inv_hhi2).matrix() / c +
                D.transpose() *
                    ((inv_glo2 + inv_ghi2) * dv_dt.array()).matrix() / c;
  return out;
}

}  // namespace dertrack

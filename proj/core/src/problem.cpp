#include "dertrack/problem.hpp"

namespace dertrack {

namespace {

void widen_degenerate(Eigen::VectorXd& lo, Eigen::VectorXd& hi,
                      Eigen::VectorXd& lo_rate, Eigen::VectorXd& hi_rate,
                      double eps) {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (hi[i] - lo[i] < 2.0 * eps) {
      const double mid = 0.5 * (lo[i] + hi[i]);
      const double mid_rate = 0.5 * (lo_rate[i] + hi_rate[i]);
      lo[i] = mid - eps;
      hi[i] = mid + eps;
      lo_rate[i] = mid_rate;
      hi_rate[i] = mid_rate;
    }
  }
}

}  // namespace

TimeVaryingQp assemble_qp(std::span<const DeviceSpec> devices,
                          const SensitivityModel& sens,
                          const NodalSignals& loads,
                          std::span<const DeviceSignal> der_signals,
                          std::span<const double> soc,
                          const QpSettings& settings) {
  const auto n = static_cast<int>(sens.a.rows());
  if (loads.load_p.size() != n || loads.load_q.size() != n ||
      loads.load_p_dot.size() != n || loads.load_q_dot.size() != n) {
    throw DimensionMismatch("load vectors do not match feeder size");
  }
  if (!(settings.v_min < settings.v_nom && settings.v_nom < settings.v_max)) {
    throw ScenarioError("voltage limits must bracket the nominal voltage");
  }

  TimeVaryingQp qp;
  qp.n = n;
  qp.v_min = settings.v_min;
  qp.v_max = settings.v_max;
  qp.obj.gamma = settings.gamma;
  qp.obj.v_nom = settings.v_nom;

  qp.d_sens.resize(n, 2 * n);
  qp.d_sens.leftCols(n) = sens.a;
  qp.d_sens.rightCols(n) = sens.b;

  qp.obj.k_diag.resize(2 * n);
  qp.obj.k_diag.head(n).setConstant(2.0 * settings.default_c_p);
  qp.obj.k_diag.tail(n).setConstant(2.0 * settings.default_c_q);
  qp.obj.d = Eigen::VectorXd::Zero(2 * n);
  qp.obj.d_dot = Eigen::VectorXd::Zero(2 * n);
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const DeviceSpec& dev = devices[i];
    const Eigen::Index ip = dev.node - 1;
    qp.obj.k_diag[ip] = 2.0 * dev.c_p;
    qp.obj.k_diag[n + ip] = 2.0 * dev.c_q;
    if (dev.kind != DeviceKind::ess) {
      // Generation target tracks availability, so d = -2 c_p P_av.
      qp.obj.d[ip] = -2.0 * dev.c_p * der_signals[i].p_av;
      qp.obj.d_dot[ip] = -2.0 * dev.c_p * der_signals[i].p_av_dot;
    }
  }

  ControlBox box = assemble_box(devices, n, der_signals, soc);
  widen_degenerate(box.u_min, box.u_max, box.du_min, box.du_max,
                   settings.eps_box);
  qp.u_min = std::move(box.u_min);
  qp.u_max = std::move(box.u_max);
  qp.du_min = std::move(box.du_min);
  qp.du_max = std::move(box.du_max);

  qp.w.resize(2 * n);
  qp.w.head(n) = -loads.load_p;
  qp.w.tail(n) = -loads.load_q;
  qp.w_dot.resize(2 * n);
  qp.w_dot.head(n) = -loads.load_p_dot;
  qp.w_dot.tail(n) = -loads.load_q_dot;
  return qp;
}

double objective_value(const TimeVaryingQp& qp, const Eigen::VectorXd& u) {
  const Eigen::VectorXd v = qp.voltage_at(u);
  const Eigen::VectorXd dv = v.array() - qp.obj.v_nom;
  return 0.5 * u.dot(qp.obj.k_diag.cwiseProduct(u)) + qp.obj.d.dot(u) +
         0.5 * qp.obj.gamma * dv.squaredNorm();
}

Eigen::VectorXd objective_gradient(const TimeVaryingQp& qp,
                                   const Eigen::VectorXd& u) {
  const Eigen::VectorXd v = qp.voltage_at(u);
  const Eigen::VectorXd dv = v.array() - qp.obj.v_nom;
  return qp.obj.k_diag.cwiseProduct(u) + qp.obj.d +
         qp.obj.gamma * (qp.d_sens.transpose() * dv);
}

Eigen::VectorXd constraint_values(const TimeVaryingQp& qp,
                                  const Eigen::VectorXd& u) {
  const int n = qp.n;
  if (u.size() != 2 * n) throw DimensionMismatch("setpoint size mismatch");
  Eigen::VectorXd f(6 * n);
  f.segment(0, 2 * n) = qp.u_min - u;
  f.segment(2 * n, 2 * n) = u - qp.u_max;
  const Eigen::VectorXd v = qp.voltage_at(u);
  f.segment(4 * n, n) = Eigen::VectorXd::Constant(n, qp.v_min) - v;
  f.segment(5 * n, n) = v - Eigen::VectorXd::Constant(n, qp.v_max);
  return f;
}

Eigen::VectorXd box_midpoint(const TimeVaryingQp& qp) {
  return 0.5 * (qp.u_min + qp.u_max);
}

}  // namespace dertrack

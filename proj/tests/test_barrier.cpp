#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "dertrack/barrier.hpp"

using namespace dertrack;

namespace {

// Raw one-node instance with f(0,0) = 0 and slacks {2,1,2,1,1,1} at s = 1:
// Phi(0, 1, 1) = -2 ln 2 exactly.
TimeVaryingQp toy_qp() {
  TimeVaryingQp qp;
  qp.n = 1;
  qp.obj.k_diag = Eigen::VectorXd::Constant(2, 2.0);
  qp.obj.d = Eigen::VectorXd::Zero(2);
  qp.obj.d_dot = Eigen::VectorXd::Zero(2);
  qp.obj.gamma = 0.0;
  qp.d_sens = Eigen::MatrixXd::Zero(1, 2);
  qp.u_min = Eigen::VectorXd(2);
  qp.u_min << -1.0, 0.0;
  qp.u_max = Eigen::VectorXd(2);
  qp.u_max << 1.0, 0.0;
  qp.du_min = Eigen::VectorXd::Zero(2);
  qp.du_max = Eigen::VectorXd::Zero(2);
  qp.w = Eigen::VectorXd::Zero(2);
  qp.w_dot = Eigen::VectorXd::Zero(2);
  qp.v_min = 1.0;
  qp.v_max = 1.0;
  return qp;
}

// Two-node feeder with devices on both nodes and every drift term nonzero,
// used by the finite-difference checks.
TimeVaryingQp drifting_qp(double t) {
  FeederTopology topo;
  topo.node_count = 2;
  topo.lines = {{0, 1, 0.1, 0.2}, {1, 2, 0.2, 0.1}};
  const SensitivityModel sens = sensitivity_from_lines(topo);

  std::vector<DeviceSpec> devices(2);
  devices[0].node = 1;
  devices[0].kind = DeviceKind::pv;
  devices[1].node = 2;
  devices[1].kind = DeviceKind::wt;
  devices[1].c_p = 2.0;
  devices[1].c_q = 0.5;

  NodalSignals loads;
  loads.load_p = Eigen::VectorXd::Constant(2, 0.06);
  loads.load_p(1) = 0.04;
  loads.load_q = Eigen::VectorXd::Constant(2, 0.02);
  loads.load_p_dot = Eigen::VectorXd::Constant(2, 0.015);
  loads.load_q_dot = Eigen::VectorXd::Constant(2, -0.01);
  loads.load_p += t * loads.load_p_dot;
  loads.load_q += t * loads.load_q_dot;

  std::vector<DeviceSignal> sig = {{0.10 + 0.03 * t, 0.03},
                                   {0.08 - 0.02 * t, -0.02}};
  const std::array<double, 2> soc = {0.0, 0.0};
  return assemble_qp(devices, sens, loads, sig, soc, QpSettings{});
}

}  // namespace

TEST_CASE("surrogate value on the hand instance") {
  const TimeVaryingQp qp = toy_qp();
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
  CHECK(eval_phi(qp, u, 1.0, 1.0) ==
        doctest::Approx(-1.3862943611198906).epsilon(1e-14));
  // Doubling c halves the barrier contribution.
  CHECK(eval_phi(qp, u, 1.0, 2.0) ==
        doctest::Approx(-0.5 * 1.3862943611198906).epsilon(1e-14));
}

TEST_CASE("leaving the relaxed domain reports the offending row") {
  const TimeVaryingQp qp = toy_qp();
  Eigen::VectorXd u(2);
  u << 1.5, 0.0;  // upper P face exceeded by 0.5, relaxation only 0.1
  try {
    eval_phi(qp, u, 0.1, 1.0);
    FAIL("expected BarrierDomainViolation");
  } catch (const BarrierDomainViolation& e) {
    CHECK(e.index == 2);
  }
  CHECK_THROWS_AS(eval_blocks(qp, u, 0.1, 1.0), BarrierDomainViolation);
}

TEST_CASE("gradient and curvature blocks match finite differences") {
  const double s = 0.5, c = 10.0, t0 = 0.3;
  const TimeVaryingQp qp = drifting_qp(t0);
  Eigen::VectorXd u(4);
  u << 0.05, 0.03, 0.01, -0.02;
  const BarrierBlocks blocks = eval_blocks(qp, u, s, c);

  const double hu = 1e-6;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd up = u, dn = u;
    up(i) += hu;
    dn(i) -= hu;
    const double fd = (eval_phi(qp, up, s, c) - eval_phi(qp, dn, s, c)) /
                      (2.0 * hu);
    CHECK(blocks.grad_u(i) == doctest::Approx(fd).epsilon(1e-6));
    const Eigen::VectorXd gp = eval_blocks(qp, up, s, c).grad_u;
    const Eigen::VectorXd gn = eval_blocks(qp, dn, s, c).grad_u;
    const Eigen::VectorXd col = (gp - gn) / (2.0 * hu);
    for (int j = 0; j < 4; ++j) {
      CHECK(blocks.hess_uu(j, i) ==
            doctest::Approx(col(j)).epsilon(1e-5).scale(1.0));
    }
  }

  const double hs = 1e-7;
  const Eigen::VectorXd dgs = (eval_blocks(qp, u, s + hs, c).grad_u -
                               eval_blocks(qp, u, s - hs, c).grad_u) /
                              (2.0 * hs);
  CHECK((blocks.grad_us - dgs).norm() < 1e-5 * std::max(1.0, dgs.norm()));

  const double hc = 1e-4 * c;
  const Eigen::VectorXd dgc = (eval_blocks(qp, u, s, c + hc).grad_u -
                               eval_blocks(qp, u, s, c - hc).grad_u) /
                              (2.0 * hc);
  CHECK((blocks.grad_uc - dgc).norm() < 1e-5 * std::max(1.0, dgc.norm()));

  const double ht = 1e-5;
  const Eigen::VectorXd dgt = (eval_blocks(drifting_qp(t0 + ht), u, s, c).grad_u -
                               eval_blocks(drifting_qp(t0 - ht), u, s, c).grad_u) /
                              (2.0 * ht);
  CHECK((blocks.grad_ut - dgt).norm() < 1e-5 * std::max(1.0, dgt.norm()));
}

TEST_CASE("curvature block is symmetric positive definite") {
  const TimeVaryingQp qp = drifting_qp(0.0);
  const Eigen::VectorXd u = box_midpoint(qp);
  const BarrierBlocks blocks = eval_blocks(qp, u, 1.0, 100.0);
  CHECK((blocks.hess_uu - blocks.hess_uu.transpose()).norm() < 1e-12);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(blocks.hess_uu);
  CHECK(ldlt.info() == Eigen::Success);
  CHECK(ldlt.vectorD().minCoeff() > 0.0);
}

TEST_CASE("relaxation schedules decay, grow and saturate") {
  BarrierSchedule sched;
  CHECK(sched.s_at(0.0) == doctest::Approx(2.0));
  CHECK(sched.c_at(0.0) == doctest::Approx(1.0));
  CHECK(sched.s_at(10.0) == doctest::Approx(1e-9));
  CHECK(sched.c_at(10.0) == doctest::Approx(1e12));

  CHECK(sched.s_advance(2.0, 0.3) ==
        doctest::Approx(2.0 * std::exp(-3.0)).epsilon(1e-12));
  CHECK(sched.c_advance(1.0, 0.3) ==
        doctest::Approx(std::exp(3.0)).epsilon(1e-12));
  // Saturation clamps both schedules.
  CHECK(sched.s_advance(2e-9, 1.0) == doctest::Approx(1e-9));
  CHECK(sched.c_advance(1e11, 1.0) == doctest::Approx(1e12));
  CHECK(sched.s_rate(1e-9) == 0.0);
  CHECK(sched.c_rate(1e12) == 0.0);
  CHECK(sched.s_rate(1.0) == doctest::Approx(-10.0));
  CHECK(sched.c_rate(1.0) == doctest::Approx(10.0));
  // Event re-softening target sits well below the saturated weight.
  CHECK(sched.c_event < sched.c_max);
}

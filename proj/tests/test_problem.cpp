#include <doctest.h>

#include <array>
#include <vector>

#include "dertrack/problem.hpp"

using namespace dertrack;

namespace {

// One feeder node with one renewable, all numbers chosen so every expected
// value below is exact by hand: A = [0.1], B = [0.05], availability 0.2,
// load 0.1 + j0.05.
TimeVaryingQp one_bus_qp() {
  FeederTopology topo;
  topo.node_count = 1;
  topo.lines = {{0, 1, 0.1, 0.05}};
  const SensitivityModel sens = sensitivity_from_lines(topo);

  std::vector<DeviceSpec> devices(1);
  devices[0].node = 1;
  devices[0].kind = DeviceKind::pv;
  devices[0].c_p = 3.0;
  devices[0].c_q = 1.0;

  NodalSignals loads;
  loads.load_p = Eigen::VectorXd::Constant(1, 0.1);
  loads.load_q = Eigen::VectorXd::Constant(1, 0.05);
  loads.load_p_dot = Eigen::VectorXd::Constant(1, 0.02);
  loads.load_q_dot = Eigen::VectorXd::Constant(1, 0.01);

  const std::vector<DeviceSignal> sig = {{0.2, 0.03}};
  const std::array<double, 1> soc = {0.0};
  return assemble_qp(devices, sens, loads, sig, soc, QpSettings{});
}

}  // namespace

TEST_CASE("assembled instance carries the hand-computed coefficients") {
  const TimeVaryingQp qp = one_bus_qp();
  REQUIRE(qp.n == 1);
  CHECK(qp.obj.k_diag(0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(qp.obj.k_diag(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(qp.obj.d(0) == doctest::Approx(-1.2).epsilon(1e-15));
  CHECK(qp.obj.d(1) == 0.0);
  CHECK(qp.obj.d_dot(0) == doctest::Approx(-0.18).epsilon(1e-15));
  CHECK(qp.w(0) == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(qp.w(1) == doctest::Approx(-0.05).epsilon(1e-15));
  CHECK(qp.w_dot(0) == doctest::Approx(-0.02).epsilon(1e-15));
  CHECK(qp.d_sens(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(qp.d_sens(0, 1) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(qp.u_min(0) == 0.0);
  CHECK(qp.u_max(0) == doctest::Approx(0.2));

  Eigen::VectorXd u(2);
  u << 0.2, 0.1;
  CHECK(qp.voltage_at(u)(0) == doctest::Approx(1.0125).epsilon(1e-12));
  CHECK(objective_value(qp, u) ==
        doctest::Approx(-0.10992187499999996).epsilon(1e-12));
  u << 0.1, 0.0;
  CHECK(objective_value(qp, u) ==
        doctest::Approx(-0.08999687499999999).epsilon(1e-12));
}

TEST_CASE("objective gradient matches central differences") {
  const TimeVaryingQp qp = one_bus_qp();
  Eigen::VectorXd u(2);
  u << 0.2, 0.1;
  const Eigen::VectorXd g = objective_gradient(qp, u);
  CHECK(g(0) == doctest::Approx(0.00125).epsilon(1e-9));
  CHECK(g(1) == doctest::Approx(0.200625).epsilon(1e-9));
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd up = u, dn = u;
    up(i) += h;
    dn(i) -= h;
    const double fd =
        (objective_value(qp, up) - objective_value(qp, dn)) / (2.0 * h);
    CHECK(g(i) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("constraint stack keeps the documented ordering") {
  const TimeVaryingQp qp = one_bus_qp();
  Eigen::VectorXd u(2);
  u << 0.15, 0.05;
  const Eigen::VectorXd f = constraint_values(qp, u);
  REQUIRE(f.size() == 6);
  CHECK(f(0) == doctest::Approx(-0.15).epsilon(1e-12));           // u_min - P
  CHECK(f(1) == doctest::Approx(qp.u_min(1) - 0.05).epsilon(1e-12));
  CHECK(f(2) == doctest::Approx(-0.05).epsilon(1e-12));           // P - u_max
  CHECK(f(3) == doctest::Approx(0.05 - qp.u_max(1)).epsilon(1e-12));
  CHECK(f(4) == doctest::Approx(0.95 - 1.005).epsilon(1e-12));    // v_min - V
  CHECK(f(5) == doctest::Approx(1.005 - 1.05).epsilon(1e-12));    // V - v_max
  CHECK(qp.constraint_count() == 6);
}

TEST_CASE("degenerate faces are widened; midpoint is strictly interior") {
  // Two nodes, device only on node 2: node 1 gets the widened zero box.
  FeederTopology topo;
  topo.node_count = 2;
  topo.lines = {{0, 1, 0.1, 0.2}, {1, 2, 0.2, 0.1}};
  const SensitivityModel sens = sensitivity_from_lines(topo);

  std::vector<DeviceSpec> devices(1);
  devices[0].node = 2;
  devices[0].kind = DeviceKind::pv;

  NodalSignals loads;
  loads.load_p = Eigen::VectorXd::Constant(2, 0.05);
  loads.load_q = Eigen::VectorXd::Constant(2, 0.02);
  loads.load_p_dot = Eigen::VectorXd::Zero(2);
  loads.load_q_dot = Eigen::VectorXd::Zero(2);

  const std::vector<DeviceSignal> sig = {{0.1, 0.0}};
  const std::array<double, 1> soc = {0.0};
  const TimeVaryingQp qp =
      assemble_qp(devices, sens, loads, sig, soc, QpSettings{});

  CHECK(qp.u_min(0) == doctest::Approx(-1e-6).epsilon(1e-12));
  CHECK(qp.u_max(0) == doctest::Approx(1e-6).epsilon(1e-12));
  // Default cost applies to the no-device node.
  CHECK(qp.obj.k_diag(0) == doctest::Approx(6.0));
  CHECK(qp.obj.k_diag(2) == doctest::Approx(2.0));
  CHECK(qp.obj.d(0) == 0.0);

  const Eigen::VectorXd mid = box_midpoint(qp);
  CHECK((constraint_values(qp, mid).array() < 0.0).all());
}

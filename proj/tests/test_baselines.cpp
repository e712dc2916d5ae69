#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "dertrack/baselines.hpp"
#include "dertrack/oracle.hpp"

using namespace dertrack;

namespace {

TimeVaryingQp fixture_qp(double t) {
  FeederTopology topo;
  topo.node_count = 2;
  topo.lines = {{0, 1, 0.1, 0.2}, {1, 2, 0.2, 0.1}};
  const SensitivityModel sens = sensitivity_from_lines(topo);

  std::vector<DeviceSpec> devices(2);
  devices[0].node = 1;
  devices[0].kind = DeviceKind::pv;
  devices[1].node = 2;
  devices[1].kind = DeviceKind::wt;

  NodalSignals loads;
  loads.load_p = Eigen::VectorXd::Constant(2, 0.05);
  loads.load_q = Eigen::VectorXd::Constant(2, 0.02);
  loads.load_p_dot = Eigen::VectorXd::Zero(2);
  loads.load_q_dot = Eigen::VectorXd::Zero(2);

  // Mild drift on the wind availability; zero keeps the instance static.
  std::vector<DeviceSignal> sig = {{0.10, 0.0}, {0.08 - 0.004 * t, -0.004}};
  const std::array<double, 2> soc = {0.0, 0.0};
  return assemble_qp(devices, sens, loads, sig, soc, QpSettings{});
}

}  // namespace

TEST_CASE("both sampled baselines settle on a static problem") {
  const TimeVaryingQp qp = fixture_qp(0.0);
  const QpProvider frozen = [&](double) { return qp; };
  const double horizon = 10.0, tau = 0.02, period = 1.0;

  const QpSolution ref = solve_sampled_qp(qp);
  const TrajectoryRecord pd =
      primal_dual_track(frozen, horizon, tau, period, PrimalDualGains{});
  const TrajectoryRecord dpc =
      discrete_pc_track(frozen, horizon, tau, period, DiscretePcConfig{});

  CHECK((pd.rows.back().u - ref.u).norm() < 1e-2);
  CHECK((dpc.rows.back().u - ref.u).norm() < 1e-2);
}

TEST_CASE("sampled rows land on the fine grid and hold between samples") {
  const QpProvider provider = [](double t) { return fixture_qp(t); };
  const double horizon = 5.0, tau = 0.02, period = 1.0;
  const long rows = std::lround(horizon / tau) + 1;

  for (const TrajectoryRecord& rec :
       {primal_dual_track(provider, horizon, tau, period, PrimalDualGains{}),
        discrete_pc_track(provider, horizon, tau, period,
                          DiscretePcConfig{})}) {
    REQUIRE(static_cast<long>(rec.rows.size()) == rows);
    for (long k = 0; k < rows; ++k) {
      CHECK(std::abs(rec.rows[static_cast<std::size_t>(k)].t - k * tau) <
            1e-12);
    }
    // Zero-order hold: every row inside one sample period repeats the
    // setpoint computed at the sample instant.
    for (int k = 1; k < 50; ++k) {
      CHECK((rec.rows[static_cast<std::size_t>(k)].u - rec.rows[0].u).norm() ==
            0.0);
    }
    CHECK((rec.rows[50].u - rec.rows[0].u).norm() > 0.0);
  }
}

TEST_CASE("discrete prediction-correction iterates stay strictly feasible") {
  const QpProvider provider = [](double t) { return fixture_qp(t); };
  const TrajectoryRecord rec =
      discrete_pc_track(provider, 5.0, 0.02, 1.0, DiscretePcConfig{});
  for (std::size_t k = 0; k < rec.rows.size(); k += 50) {
    const TimeVaryingQp qp = fixture_qp(rec.rows[k].t);
    CHECK((constraint_values(qp, rec.rows[k].u).array() < 0.0).all());
  }
}

TEST_CASE("projected iteration respects the box exactly") {
  const QpProvider provider = [](double t) { return fixture_qp(t); };
  const TrajectoryRecord rec =
      primal_dual_track(provider, 5.0, 0.02, 1.0, PrimalDualGains{});
  for (std::size_t k = 0; k < rec.rows.size(); k += 50) {
    const TimeVaryingQp qp = fixture_qp(rec.rows[k].t);
    CHECK((rec.rows[k].u.array() >= qp.u_min.array() - 1e-12).all());
    CHECK((rec.rows[k].u.array() <= qp.u_max.array() + 1e-12).all());
  }
}

TEST_CASE("a falling availability cap cannot strand the sampled iterate") {
  // The wind cap drops fast enough that a held setpoint pinned near the cap
  // would sit outside the next sampled box; the tracker must recover rather
  // than throw.
  const QpProvider provider = [](double t) {
    FeederTopology topo;
    topo.node_count = 1;
    topo.lines = {{0, 1, 0.1, 0.05}};
    const SensitivityModel sens = sensitivity_from_lines(topo);
    std::vector<DeviceSpec> devices(1);
    devices[0].node = 1;
    devices[0].kind = DeviceKind::wt;
    NodalSignals loads;
    loads.load_p = Eigen::VectorXd::Constant(1, 0.2);
    loads.load_q = Eigen::VectorXd::Constant(1, 0.1);
    loads.load_p_dot = Eigen::VectorXd::Zero(1);
    loads.load_q_dot = Eigen::VectorXd::Zero(1);
    // Net load keeps V < 1, so the optimum rides the falling cap itself.
    std::vector<DeviceSignal> sig = {{0.2 - 0.015 * t, -0.015}};
    const std::array<double, 1> soc = {0.0};
    return assemble_qp(devices, sens, loads, sig, soc, QpSettings{});
  };
  const TrajectoryRecord rec =
      discrete_pc_track(provider, 10.0, 0.02, 1.0, DiscretePcConfig{});
  for (std::size_t k = 0; k < rec.rows.size(); k += 50) {
    const TimeVaryingQp qp = provider(rec.rows[k].t);
    CHECK((constraint_values(qp, rec.rows[k].u).array() < 0.0).all());
  }
}

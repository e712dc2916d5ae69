// Per-operation costs on the 33-bus feeder, sized like one controller
// interval: derivative assembly, one 20 ms integrator step, a cold
// reference solve and one estimator update.

#include <benchmark/benchmark.h>

#include <random>

#include "dertrack/barrier.hpp"
#include "dertrack/dynamics.hpp"
#include "dertrack/engine.hpp"
#include "dertrack/estimator.hpp"
#include "dertrack/oracle.hpp"
#include "dertrack/problem.hpp"
#include "dertrack/scenario.hpp"

namespace {

using namespace dertrack;

const std::string kData = DERTRACK_DATA_DIR;

struct Fixture {
  Scenario sc;
  World world;
  TimeVaryingQp qp;
  Eigen::VectorXd u;

  Fixture()
      : sc(load_scenario(kData + "/scenarios/normal.json")),
        world(sc),
        qp(world.true_qp_at(0.0)),
        u(box_midpoint(qp)) {}
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_BarrierDerivatives(benchmark::State& state) {
  Fixture& f = fixture();
  const double s = 1e-3;
  const double c = 1e6;
  for (auto _ : state) {
    BarrierBlocks blocks = eval_blocks(f.qp, f.u, s, c);
    benchmark::DoNotOptimize(blocks.grad_u.data());
  }
}
BENCHMARK(BM_BarrierDerivatives);

void BM_IntegratorStep(benchmark::State& state) {
  Fixture& f = fixture();
  const QpProvider provider = f.world.true_provider();
  const BarrierSchedule& sched = f.sc.schedule;
  const IntegratorConfig& cfg = f.sc.integrator;

  PcState init;
  init.u = f.u;
  init.t = 0.0;
  init.s = init_slack(f.qp, init.u, sched.s_at(0.0), cfg.slack_margin);
  init.c = sched.c_at(0.0);

  for (auto _ : state) {
    PcState next = step(init, provider, sched, cfg);
    benchmark::DoNotOptimize(next.u.data());
  }
}
BENCHMARK(BM_IntegratorStep);

void BM_ReferenceSolve(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    QpSolution sol = solve_sampled_qp(f.qp);
    benchmark::DoNotOptimize(sol.u.data());
  }
}
BENCHMARK(BM_ReferenceSolve);

void BM_EstimatorSolve(benchmark::State& state) {
  Fixture& f = fixture();
  const ReducedIncidence& inc = f.world.incidence();
  const Eigen::VectorXd zeta = f.world.zeta();
  const SensitivityModel& truth = f.world.true_model();

  // Two independently excited snapshots fill the window (m = 1).
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  MeasurementWindow window;
  window.m = 1;
  for (int k = 0; k < 2; ++k) {
    Snapshot snap;
    snap.t = 0.02 * k;
    snap.p.resize(inc.m.rows());
    snap.q.resize(inc.m.rows());
    for (int i = 0; i < snap.p.size(); ++i) {
      snap.p[i] = jitter(rng);
      snap.q[i] = jitter(rng);
    }
    snap.v = model_voltage(truth, snap.p, snap.q);
    window.push(std::move(snap));
  }

  for (auto _ : state) {
    RegressionSystem sys = build_regression(window, inc, zeta);
    EstimateResult est = solve_sensitivities(sys, inc, zeta);
    benchmark::DoNotOptimize(est.x_hat.data());
  }
}
BENCHMARK(BM_EstimatorSolve);

}  // namespace

BENCHMARK_MAIN();

#include "dertrack/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <utility>

namespace dertrack {

namespace {

std::string profile_tag(const DeviceSpec& dev) {
  const char* kind = dev.kind == DeviceKind::pv   ? "pv"
                     : dev.kind == DeviceKind::wt ? "wt"
                                                  : "ess";
  return kind + std::to_string(dev.node);
}

}  // namespace

World::World(Scenario scenario)
    : scenario_(std::move(scenario)),
      topology_(scenario_.feeder.topology),
      perturb_rng_(stream_seed(scenario_.seed, "plant-params")),
      noise_rng_(stream_seed(scenario_.seed, "voltage-noise")) {
  halted_.assign(scenario_.devices.size(), 0);
  soc_.reserve(scenario_.devices.size());
  der_profiles_.reserve(scenario_.devices.size());
  for (std::size_t i = 0; i < scenario_.devices.size(); ++i) {
    const DeviceSpec& dev = scenario_.devices[i];
    soc_.push_back(dev.ess ? dev.ess->w_init : 0.0);
    der_profiles_.push_back(materialize(scenario_.device_profiles[i],
                                        scenario_.horizon_s, scenario_.seed,
                                        profile_tag(dev)));
  }
  load_profile_ = materialize(scenario_.load_profile, scenario_.horizon_s,
                              scenario_.seed, "load");
  rebuild_models();
}

void World::rebuild_models() {
  incidence_ = build_incidence(topology_);
  Eigen::VectorXd r(topology_.lines.size()), x(topology_.lines.size());
  for (std::size_t j = 0; j < topology_.lines.size(); ++j) {
    r[j] = topology_.lines[j].r;
    x[j] = topology_.lines[j].x;
  }
  rated_model_ = sensitivity_from_lines(incidence_, r, x);
  true_lines_ = perturb_lines(topology_, scenario_.noise.reactance_sigma2,
                              perturb_rng_);
  for (std::size_t j = 0; j < true_lines_.size(); ++j) {
    r[j] = true_lines_[j].r;
    x[j] = true_lines_[j].x;
  }
  true_model_ = sensitivity_from_lines(incidence_, r, x);
}

Eigen::VectorXd World::true_x() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(true_lines_.size()));
  for (std::size_t j = 0; j < true_lines_.size(); ++j) x[j] = true_lines_[j].x;
  return x;
}

NodalSignals World::loads_at(double t) const {
  const Interpolant::Eval mult = load_profile_(t);
  NodalSignals sig;
  sig.load_p = scenario_.feeder.base_load_p * mult.value;
  sig.load_q = scenario_.feeder.base_load_q * mult.value;
  sig.load_p_dot = scenario_.feeder.base_load_p * mult.derivative;
  sig.load_q_dot = scenario_.feeder.base_load_q * mult.derivative;
  return sig;
}

std::vector<DeviceSignal> World::der_signals_at(double t) const {
  std::vector<DeviceSignal> out(scenario_.devices.size());
  for (std::size_t i = 0; i < scenario_.devices.size(); ++i) {
    if (scenario_.devices[i].kind == DeviceKind::ess) continue;
    if (halted_[i]) continue;  // curtailed to zero availability
    const Interpolant::Eval ev = der_profiles_[i](t);
    out[i] = {ev.value, ev.derivative};
  }
  return out;
}

TimeVaryingQp World::qp_at(double t, const SensitivityModel& model) const {
  const NodalSignals loads = loads_at(t);
  const std::vector<DeviceSignal> signals = der_signals_at(t);
  return assemble_qp(scenario_.devices, model, loads, signals, soc_,
                     scenario_.qp_settings);
}

QpProvider World::true_provider() const {
  return [this](double t) { return true_qp_at(t); };
}

Snapshot World::measure(const Eigen::VectorXd& u, double t) {
  const int n = topology_.node_count;
  const NodalSignals loads = loads_at(t);
  Snapshot snap;
  snap.t = t;
  snap.p = u.head(n) - loads.load_p;
  snap.q = u.tail(n) - loads.load_q;
  snap.v = model_voltage(true_model_, snap.p, snap.q);
  if (scenario_.noise.voltage_sigma2 > 0.0) {
    std::normal_distribution<double> dist(
        0.0, std::sqrt(scenario_.noise.voltage_sigma2));
    for (int i = 0; i < n; ++i) snap.v[i] += dist(noise_rng_);
  }
  return snap;
}

int World::apply_due_events(double t) {
  int fired = 0;
  while (next_event_ < scenario_.events.size() &&
         scenario_.events[next_event_].time_s <= t + 1e-9) {
    const Event& ev = scenario_.events[next_event_];
    ++next_event_;
    switch (ev.kind) {
      case EventKind::pv_halt:
      case EventKind::pv_resume:
        for (std::size_t i = 0; i < scenario_.devices.size(); ++i) {
          if (scenario_.devices[i].node == ev.node &&
              scenario_.devices[i].kind != DeviceKind::ess) {
            halted_[i] = ev.kind == EventKind::pv_halt ? 1 : 0;
          }
        }
        break;
      case EventKind::reconfigure:
        topology_.lines = ev.new_lines;
        rebuild_models();
        reconfig_flag_ = true;
        break;
    }
    ++fired;
  }
  return fired;
}

bool World::reconfigured_since_last_check() {
  return std::exchange(reconfig_flag_, false);
}

void World::update_soc(const Eigen::VectorXd& u, double tau) {
  for (std::size_t i = 0; i < scenario_.devices.size(); ++i) {
    const DeviceSpec& dev = scenario_.devices[i];
    if (!dev.ess) continue;
    soc_[i] = ess_soc_step(*dev.ess, soc_[i], u[dev.node - 1], tau);
  }
}

RunResult run(const Scenario& scenario, const EngineOptions& options) {
  World world(scenario);
  const int n = world.node_count();
  const IntegratorConfig& cfg = scenario.integrator;
  const BarrierSchedule& sched = scenario.schedule;
  const long intervals = std::lround(scenario.horizon_s / cfg.tau);
  if (intervals < 1) {
    throw TooFewSamples("horizon shorter than one control interval");
  }
  if (std::abs(static_cast<double>(intervals) * cfg.tau -
               scenario.horizon_s) > 1e-6) {
    throw ScenarioLoadError("horizon_s is not a multiple of the step tau");
  }

  RunResult out;
  out.record.n = n;
  out.record.tau = cfg.tau;
  out.record.rows.reserve(static_cast<std::size_t>(intervals) + 1);
  RunStats& stats = out.stats;

  // Events timestamped at zero are static setup, not mid-run changes.
  world.apply_due_events(0.0);
  (void)world.reconfigured_since_last_check();

  const bool estimating = scenario.mode == SensitivityMode::estimated;
  SensitivityEstimator estimator;
  if (estimating) {
    estimator = SensitivityEstimator(
        world.incidence(), world.zeta(), world.rated_model(),
        scenario.estimator.window_m, scenario.estimator.eta,
        scenario.estimator.options);
  }
  SensitivityModel controller_model = world.rated_model();

  const TimeVaryingQp qp0 = world.qp_at(0.0, controller_model);
  PcState state;
  state.u = box_midpoint(qp0);
  state.t = 0.0;
  state.c = sched.c_at(0.0);
  state.s = init_slack(qp0, state.u, sched.s_at(0.0), cfg.slack_margin);

  std::optional<Eigen::VectorXd> oracle_warm;
  const auto record_row = [&](EstimatorRowStatus status) {
    TrajectoryRow row;
    row.t = state.t;
    row.u = state.u;
    row.s = state.s;
    row.c = state.c;
    const TimeVaryingQp truth = world.true_qp_at(state.t);
    row.v = truth.voltage_at(state.u);
    row.objective = objective_value(truth, state.u);
    row.status = status;
    if (options.with_oracle) {
      const QpSolution sol = solve_sampled_qp(truth, oracle_warm,
                                              options.oracle);
      oracle_warm = sol.u;
      row.has_reference = true;
      row.u_ref = sol.u;
      row.objective_ref = sol.objective;
      ++stats.oracle_solves;
    }
    out.record.rows.push_back(std::move(row));
  };

  record_row(estimating ? EstimatorRowStatus::waiting
                        : EstimatorRowStatus::none);

  for (long k = 0; k < intervals; ++k) {
    const auto wall0 = std::chrono::steady_clock::now();
    const double t_k = static_cast<double>(k) * cfg.tau;

    const int fired = world.apply_due_events(t_k);
    const bool reconfigured = world.reconfigured_since_last_check();
    if (reconfigured) {
      controller_model = world.rated_model();
      if (estimating) {
        estimator.reset(world.incidence(), world.zeta(), world.rated_model());
      }
    }

    EstimatorRowStatus status = EstimatorRowStatus::none;
    if (estimating) {
      // Feedback path: the plant is read under the setpoint held since the
      // previous interval, then the model refreshes before this step.
      const SensitivityEstimator::Status est =
          estimator.update(world.measure(state.u, t_k));
      controller_model = estimator.current();
      switch (est) {
        case SensitivityEstimator::Status::waiting:
          status = EstimatorRowStatus::waiting;
          break;
        case SensitivityEstimator::Status::estimated:
          status = EstimatorRowStatus::estimated;
          break;
        case SensitivityEstimator::Status::held:
          status = EstimatorRowStatus::held;
          break;
        case SensitivityEstimator::Status::flushed:
          status = EstimatorRowStatus::flushed;
          break;
      }
    }
    if (reconfigured) status = EstimatorRowStatus::flushed;

    if (fired > 0) {
      // An event can move a constraint past the state; lift the relaxation
      // so the barrier domain contains u again (halving cannot fix this),
      // and re-soften the barrier so the jumped constraint set is absorbed
      // at a trackable stiffness.
      const TimeVaryingQp qp_now = world.qp_at(t_k, controller_model);
      state.s = init_slack(qp_now, state.u, state.s, cfg.slack_margin);
      state.c = std::min(state.c, sched.c_event);
    }

    const QpProvider provider = [&world, &controller_model](double t) {
      return world.qp_at(t, controller_model);
    };
    StepStats sstats;
    state = step(state, provider, sched, cfg, &sstats);
    stats.substeps_executed += sstats.substeps_executed;
    stats.factorizations += sstats.factorizations;
    stats.halvings += sstats.halvings;
    world.update_soc(state.u, cfg.tau);
    ++stats.intervals;

    const auto wall1 = std::chrono::steady_clock::now();
    stats.step_seconds.push_back(
        std::chrono::duration<double>(wall1 - wall0).count());
    record_row(status);
  }

  stats.estimator_solves = estimator.solve_count();
  stats.estimator_held = estimator.held_count();
  out.final_soc = world.soc();
  out.x_true = world.true_x();
  if (estimating) out.x_hat = estimator.x_hat();
  return out;
}

double RunStats::median_step_seconds() const {
  if (step_seconds.empty()) return 0.0;
  std::vector<double> v = step_seconds;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  if (v.size() % 2 != 0) return v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + v[mid]);
}

void export_csv(const TrajectoryRecord& record, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ScenarioLoadError("cannot open for writing: " + path);
  const int n = record.n;
  const bool with_ref =
      !record.rows.empty() && record.rows.front().has_reference;
  std::string header = "t";
  for (int i = 1; i <= n; ++i) header += ",u_p_" + std::to_string(i);
  for (int i = 1; i <= n; ++i) header += ",u_q_" + std::to_string(i);
  for (int i = 1; i <= n; ++i) header += ",v_" + std::to_string(i);
  header += ",f,s,c";
  if (with_ref) header += ",err_u,err_f";
  std::fprintf(f, "%s\n", header.c_str());
  char buf[40];
  const auto put = [&](double value, char sep) {
    std::snprintf(buf, sizeof buf, "%.17e", value);
    std::fputs(buf, f);
    std::fputc(sep, f);
  };
  for (const TrajectoryRow& row : record.rows) {
    put(row.t, ',');
    for (int i = 0; i < 2 * n; ++i) put(row.u[i], ',');
    for (int i = 0; i < n; ++i) put(row.v[i], ',');
    put(row.objective, ',');
    put(row.s, ',');
    put(row.c, with_ref ? ',' : '\n');
    if (with_ref) {
      put((row.u - row.u_ref).norm(), ',');
      put(std::abs(row.objective - row.objective_ref), '\n');
    }
  }
  std::fclose(f);
}

}  // namespace dertrack

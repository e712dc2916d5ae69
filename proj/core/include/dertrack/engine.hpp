#pragma once

#include <memory>
#include <random>

#include "dertrack/metrics.hpp"
#include "dertrack/oracle.hpp"
#include "dertrack/scenario.hpp"
#include "dertrack/trajectory.hpp"

namespace dertrack {

// Mutable simulation state behind a scenario: current topology (events can
// replace it), perturbed ground-truth parameters, device availability
// overrides, storage SOC, and the exogenous signal interpolants.
class World {
 public:
  explicit World(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  int node_count() const { return topology_.node_count; }
  const FeederTopology& topology() const { return topology_; }
  const ReducedIncidence& incidence() const { return incidence_; }
  const SensitivityModel& rated_model() const { return rated_model_; }
  const SensitivityModel& true_model() const { return true_model_; }
  Eigen::VectorXd zeta() const { return topology_.zeta(); }
  Eigen::VectorXd true_x() const;

  NodalSignals loads_at(double t) const;
  std::vector<DeviceSignal> der_signals_at(double t) const;
  const std::vector<double>& soc() const { return soc_; }

  TimeVaryingQp qp_at(double t, const SensitivityModel& model) const;
  TimeVaryingQp true_qp_at(double t) const { return qp_at(t, true_model_); }
  // Provider over the ground-truth model with the world's current event
  // state; the world must outlive the returned callable.
  QpProvider true_provider() const;

  // Ground-truth measurement of the setpoint u at time t. Adds voltage
  // noise when configured (consumes the measurement noise stream).
  Snapshot measure(const Eigen::VectorXd& u, double t);

  // Applies every event with time <= t (each once); returns how many fired.
  // Reconfiguration swaps the line set, re-perturbs the ground truth and
  // re-rates zeta/incidence.
  int apply_due_events(double t);
  bool reconfigured_since_last_check();

  void update_soc(const Eigen::VectorXd& u, double tau);

 private:
  void rebuild_models();

  Scenario scenario_;
  FeederTopology topology_;  // current rated line set
  ReducedIncidence incidence_;
  SensitivityModel rated_model_;
  SensitivityModel true_model_;
  std::vector<Line> true_lines_;
  std::vector<Interpolant> der_profiles_;
  Interpolant load_profile_;
  std::vector<char> halted_;  // aligned with devices
  std::vector<double> soc_;
  std::size_t next_event_ = 0;
  bool reconfig_flag_ = false;
  std::mt19937_64 perturb_rng_;
  std::mt19937_64 noise_rng_;
};

struct EngineOptions {
  bool with_oracle = false;  // attach the sampled reference to every row
  OracleOptions oracle;
};

struct RunResult {
  TrajectoryRecord record;
  RunStats stats;
  std::vector<double> final_soc;
  Eigen::VectorXd x_true;  // ground-truth reactances at the end of the run
  Eigen::VectorXd x_hat;   // last estimate; empty in fixed_rated mode
};

// Full closed-loop run: per interval it applies due events, measures the
// plant, refreshes the sensitivity estimate, advances the tracking dynamics
// one outer step and records the new state.
RunResult run(const Scenario& scenario, const EngineOptions& options = {});

}  // namespace dertrack

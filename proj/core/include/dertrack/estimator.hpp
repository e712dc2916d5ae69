#pragma once

#include <Eigen/Dense>
#include <deque>

#include "dertrack/feeder.hpp"

namespace dertrack {

// One synchronized measurement set: net injections and voltages.
struct Snapshot {
  double t = 0.0;
  Eigen::VectorXd p, q, v;  // n each
};

// Sliding window of the newest m+1 snapshots with forgetting factor eta.
struct MeasurementWindow {
  int m = 1;
  double eta = 1.0;
  std::deque<Snapshot> snaps;

  bool full() const { return static_cast<int>(snaps.size()) == m + 1; }
  void push(Snapshot snap);
  void flush() { snaps.clear(); }
};

// Stacked linear system Z x = phi for the line reactances. Row block k holds
// snapshot k (oldest first); column l is Y_l chi_l[k] with
// Y_l = M^-T e_l e_l' M^-1 and chi_l[k] = eta^{age/2} (zeta_l P[k] + Q[k]).
// phi stacks eta^{age/2} (V[k] - 1).
struct RegressionSystem {
  Eigen::MatrixXd z;    // n(m+1) x n
  Eigen::VectorXd phi;  // n(m+1)
};

RegressionSystem build_regression(const MeasurementWindow& window,
                                  const ReducedIncidence& inc,
                                  const Eigen::VectorXd& zeta);

struct EstimatorOptions {
  double rank_tol = 1e-8;  // sigma_min >= rank_tol * sigma_max required
  double x_floor = 1e-6;   // reactances clamped up to this, counted
};

struct EstimateResult {
  Eigen::VectorXd x_hat;  // line reactances
  Eigen::VectorXd r_hat;  // zeta .* x_hat
  SensitivityModel model;
  int floored = 0;  // entries clamped at x_floor
};

// SVD least squares (one factorization serves the rank test and the solve);
// throws RankDeficientExcitation when the excitation does not pin down
// every line.
EstimateResult solve_sensitivities(const RegressionSystem& sys,
                                   const ReducedIncidence& inc,
                                   const Eigen::VectorXd& zeta,
                                   const EstimatorOptions& opts = {});

// Engine-facing wrapper: windowing, hold-last fallback and counters.
class SensitivityEstimator {
 public:
  enum class Status { waiting, estimated, held, flushed };

  SensitivityEstimator() = default;
  SensitivityEstimator(ReducedIncidence inc, Eigen::VectorXd zeta,
                       SensitivityModel initial, int window_m, double eta,
                       EstimatorOptions opts = {});

  // Pushes one snapshot; re-estimates if the window is full.
  Status update(Snapshot snap);
  // Topology change: new incidence/ratios/fallback model, window cleared.
  void reset(ReducedIncidence inc, Eigen::VectorXd zeta,
             SensitivityModel initial);

  const SensitivityModel& current() const { return model_; }
  const Eigen::VectorXd& x_hat() const { return x_hat_; }
  long solve_count() const { return solves_; }
  long held_count() const { return held_; }

 private:
  ReducedIncidence inc_;
  Eigen::VectorXd zeta_;
  SensitivityModel model_;
  Eigen::VectorXd x_hat_;
  MeasurementWindow window_;
  EstimatorOptions opts_;
  long solves_ = 0;
  long held_ = 0;
};

}  // namespace dertrack

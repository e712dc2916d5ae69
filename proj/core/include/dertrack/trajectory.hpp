#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dertrack {

enum class EstimatorRowStatus {
  none = 0,       // estimator inactive (fixed-parameter run)
  waiting = 1,    // window not yet full, fallback model in use
  estimated = 2,  // fresh estimate this interval
  held = 3,       // rank-deficient window, previous estimate kept
  flushed = 4,    // topology event cleared the window this interval
};

struct TrajectoryRow {
  double t = 0.0;
  Eigen::VectorXd u;  // 2n
  Eigen::VectorXd v;  // n, ground-truth voltages under u
  double objective = 0.0;
  double s = 0.0;
  double c = 0.0;
  EstimatorRowStatus status = EstimatorRowStatus::none;
  // Filled when a reference solution is attached.
  bool has_reference = false;
  Eigen::VectorXd u_ref;
  double objective_ref = 0.0;
};

struct TrajectoryRecord {
  int n = 0;
  double tau = 0.0;
  std::vector<TrajectoryRow> rows;
};

struct RunStats {
  long intervals = 0;
  long substeps_executed = 0;
  long factorizations = 0;
  long halvings = 0;
  long estimator_solves = 0;
  long estimator_held = 0;
  long oracle_solves = 0;
  std::vector<double> step_seconds;  // wall time per outer interval
  double median_step_seconds() const;
};

// `t,u_p_1..u_p_n,u_q_1..u_q_n,v_1..v_n,f,s,c[,err_u,err_f]`, every value
// %.17e so repeated runs are byte-identical.
void export_csv(const TrajectoryRecord& record, const std::string& path);

}  // namespace dertrack

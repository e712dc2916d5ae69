#pragma once

#include <Eigen/Dense>
#include <optional>

#include "dertrack/problem.hpp"

namespace dertrack {

struct QpSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd multipliers;  // 6n, stacked constraint ordering
  double objective = 0.0;
  double stationarity = 0.0;
  double feasibility = 0.0;  // max positive constraint value
  double complementarity = 0.0;
  int iterations = 0;
};

struct OracleOptions {
  int max_iterations = 100;
  double stat_tol = 1e-9;
  double feas_tol = 1e-10;
  double comp_tol = 1e-10;
};

// Reference solver for one sampled instance: dense predictor-corrector
// interior-point iteration run to convergence. Warm starts only shift the
// primal initializer, so results are warm-start independent up to the
// stated tolerances.
QpSolution solve_sampled_qp(const TimeVaryingQp& qp,
                            const std::optional<Eigen::VectorXd>& warm = {},
                            const OracleOptions& opts = {});

}  // namespace dertrack

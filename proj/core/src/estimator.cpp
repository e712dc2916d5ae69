#include "dertrack/estimator.hpp"

#include <Eigen/SVD>

namespace dertrack {

void MeasurementWindow::push(Snapshot snap) {
  snaps.push_back(std::move(snap));
  while (static_cast<int>(snaps.size()) > m + 1) snaps.pop_front();
}

RegressionSystem build_regression(const MeasurementWindow& window,
                                  const ReducedIncidence& inc,
                                  const Eigen::VectorXd& zeta) {
  if (!window.full()) {
    throw WindowNotFull("estimation window holds " +
                        std::to_string(window.snaps.size()) + " of " +
                        std::to_string(window.m + 1) + " snapshots");
  }
  const Eigen::Index n = inc.m.rows();
  if (zeta.size() != n) throw DimensionMismatch("zeta size mismatch");
  const int rows = window.m + 1;

  RegressionSystem sys;
  sys.z.resize(n * rows, n);
  sys.phi.resize(n * rows);
  // With Y_l = M^-T e_l e_l' M^-1, column l of a block is
  // M^-T e_l * (e_l' M^-1 chi_l), so a whole block is
  // M^-T diag(M^-1 row products); assemble via two triangular-ish products.
  for (int k = 0; k < rows; ++k) {
    const Snapshot& snap = window.snaps[static_cast<std::size_t>(k)];
    if (snap.p.size() != n || snap.q.size() != n || snap.v.size() != n) {
      throw DimensionMismatch("snapshot size mismatch");
    }
    const int age = rows - 1 - k;  // newest snapshot has age 0
    const double w = std::pow(window.eta, 0.5 * age);
    const Eigen::VectorXd minv_p = inc.m_inv * snap.p;
    const Eigen::VectorXd minv_q = inc.m_inv * snap.q;
    // scale_l = e_l' M^-1 (zeta_l P + Q)
    const Eigen::VectorXd scale =
        zeta.cwiseProduct(minv_p) + minv_q;
    sys.z.middleRows(k * n, n) =
        w * (inc.m_inv.transpose() * scale.asDiagonal());
    sys.phi.segment(k * n, n) = w * (snap.v.array() - 1.0).matrix();
  }
  return sys;
}

EstimateResult solve_sensitivities(const RegressionSystem& sys,
                                   const ReducedIncidence& inc,
                                   const Eigen::VectorXd& zeta,
                                   const EstimatorOptions& opts) {
  // One orthogonal factorization does both the rank check and the solve;
  // normal equations are never formed.
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      sys.z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0 ||
      sv[sv.size() - 1] < opts.rank_tol * sv[0]) {
    throw RankDeficientExcitation(
        "measurement window does not excite every line");
  }
  EstimateResult res;
  res.x_hat = svd.solve(sys.phi);
  for (Eigen::Index l = 0; l < res.x_hat.size(); ++l) {
    if (res.x_hat[l] < opts.x_floor) {
      res.x_hat[l] = opts.x_floor;
      ++res.floored;
    }
  }
  res.r_hat = zeta.cwiseProduct(res.x_hat);
  res.model = sensitivity_from_lines(inc, res.r_hat, res.x_hat);
  return res;
}

SensitivityEstimator::SensitivityEstimator(ReducedIncidence inc,
                                           Eigen::VectorXd zeta,
                                           SensitivityModel initial,
                                           int window_m, double eta,
                                           EstimatorOptions opts)
    : inc_(std::move(inc)),
      zeta_(std::move(zeta)),
      model_(std::move(initial)),
      opts_(opts) {
  window_.m = window_m;
  window_.eta = eta;
}

SensitivityEstimator::Status SensitivityEstimator::update(Snapshot snap) {
  window_.push(std::move(snap));
  if (!window_.full()) return Status::waiting;
  try {
    const RegressionSystem sys = build_regression(window_, inc_, zeta_);
    EstimateResult res = solve_sensitivities(sys, inc_, zeta_, opts_);
    ++solves_;
    model_ = std::move(res.model);
    x_hat_ = std::move(res.x_hat);
    return Status::estimated;
  } catch (const RankDeficientExcitation&) {
    ++held_;  // keep the previous estimate
    return Status::held;
  }
}

void SensitivityEstimator::reset(ReducedIncidence inc, Eigen::VectorXd zeta,
                                 SensitivityModel initial) {
  inc_ = std::move(inc);
  zeta_ = std::move(zeta);
  model_ = std::move(initial);
  x_hat_.resize(0);
  window_.flush();
}

}  // namespace dertrack

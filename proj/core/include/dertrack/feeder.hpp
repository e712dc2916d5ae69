#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dertrack/errors.hpp"

namespace dertrack {

// One distribution line, parameters in per-unit on the feeder base.
// Orientation (from -> to) is whatever the data file says; the incidence
// construction works for any consistent orientation.
struct Line {
  int from = 0;
  int to = 0;
  double r = 0.0;  // pu
  double x = 0.0;  // pu
};

// Radial feeder. Node 0 is the PCC (slack); nodes 1..n carry loads/DERs.
// Radiality (tree rooted at node 0, line_count == node_count) is validated
// by build_incidence.
struct FeederTopology {
  int node_count = 0;  // n, excludes the PCC
  std::vector<Line> lines;

  // r/x ratio per line, in file order.
  Eigen::VectorXd zeta() const;
};

// Reduced node-to-branch incidence: +1 at the from node, -1 at the to node,
// PCC row removed. Square and invertible exactly when the feeder is radial.
// The inverse is cached; it is a signed path-indicator matrix, so the LU
// inverse is accurate to machine precision.
struct ReducedIncidence {
  Eigen::MatrixXd m;      // n x n
  Eigen::MatrixXd m_inv;  // n x n
};

ReducedIncidence build_incidence(const FeederTopology& topology);

// Linearized voltage model: V = A*P + B*Q + 1, injections positive into the
// node. A and B are symmetric positive definite for a radial feeder with
// positive r, x.
struct SensitivityModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

// A = M^-T diag(r) M^-1, B = M^-T diag(x) M^-1.
SensitivityModel sensitivity_from_lines(const ReducedIncidence& inc,
                                        const Eigen::VectorXd& r,
                                        const Eigen::VectorXd& x);
SensitivityModel sensitivity_from_lines(const FeederTopology& topology);

Eigen::VectorXd model_voltage(const SensitivityModel& model,
                              const Eigen::VectorXd& p,
                              const Eigen::VectorXd& q);

// Parameter uncertainty and measurement noise. reactance_sigma2 is the
// variance of the additive per-unit perturbation on line reactances;
// voltage_sigma2 the variance of additive noise on measured voltages.
struct MeasurementNoiseSpec {
  double reactance_sigma2 = 0.0;
  double voltage_sigma2 = 0.0;
};

// Draws one perturbation of the line reactances: x <- max(x + e, 0.1 x) with
// e ~ N(0, sigma2), and scales r so the r/x ratio of every line is preserved
// (the ratio is the quantity the estimator treats as known).
std::vector<Line> perturb_lines(const FeederTopology& topology, double sigma2,
                                std::mt19937_64& rng);

// One-shot ground-truth helper: derives the perturbed model from the seed,
// computes V = A P + B Q + 1 and adds voltage noise if configured. Two calls
// with identical arguments return identical results.
std::pair<Eigen::VectorXd, SensitivityModel> perturb_and_measure(
    const FeederTopology& topology, const MeasurementNoiseSpec& noise,
    std::uint64_t seed, const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Feeder data file: per-unit conversion of the ohm-valued line list plus the
// nominal loads keyed by node (kW / kvar on the same base).
struct FeederData {
  FeederTopology topology;
  double base_kv = 0.0;
  double base_mva = 0.0;
  Eigen::VectorXd base_load_p;  // pu consumption per node 1..n (positive)
  Eigen::VectorXd base_load_q;
};

FeederData load_feeder_file(const std::string& path);

}  // namespace dertrack

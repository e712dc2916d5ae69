#include "dertrack/oracle.hpp"

#include <Eigen/Cholesky>

namespace dertrack {

namespace {

struct DenseQp {
  Eigen::MatrixXd h;      // 2n x 2n
  Eigen::VectorXd q;      // 2n
  Eigen::MatrixXd g;      // 6n x 2n
  Eigen::VectorXd rhs;    // 6n
};

// Gu <= rhs reproduces constraint_values(qp, u) = G u - rhs exactly.
DenseQp condense(const TimeVaryingQp& qp) {
  const int n = qp.n;
  const Eigen::MatrixXd& D = qp.d_sens;
  DenseQp d;
  d.h = qp.obj.gamma * (D.transpose() * D);
  d.h.diagonal() += qp.obj.k_diag;
  const Eigen::VectorXd base = (D * qp.w).array() + 1.0;  // V at u = 0
  d.q = qp.obj.d +
        qp.obj.gamma * (D.transpose() * (base.array() - qp.obj.v_nom).matrix());
  d.g.setZero(6 * n, 2 * n);
  d.g.block(0, 0, 2 * n, 2 * n) = -Eigen::MatrixXd::Identity(2 * n, 2 * n);
  d.g.block(2 * n, 0, 2 * n, 2 * n) = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  d.g.block(4 * n, 0, n, 2 * n) = -D;
  d.g.block(5 * n, 0, n, 2 * n) = D;
  d.rhs.resize(6 * n);
  d.rhs.segment(0, 2 * n) = -qp.u_min;
  d.rhs.segment(2 * n, 2 * n) = qp.u_max;
  d.rhs.segment(4 * n, n) = (base.array() - qp.v_min).matrix();
  d.rhs.segment(5 * n, n) = (-(base.array() - qp.v_max)).matrix();
  return d;
}

}  // namespace

QpSolution solve_sampled_qp(const TimeVaryingQp& qp,
                            const std::optional<Eigen::VectorXd>& warm,
                            const OracleOptions& opts) {
  const DenseQp d = condense(qp);
  const Eigen::Index nu = d.h.rows();
  const Eigen::Index p = d.g.rows();

  Eigen::VectorXd u;
  if (warm && warm->size() == nu) {
    // Clamp strictly inside the box; voltage rows may start violated.
    u = *warm;
    for (Eigen::Index i = 0; i < nu; ++i) {
      const double pad = 0.05 * (qp.u_max[i] - qp.u_min[i]);
      u[i] = std::clamp(u[i], qp.u_min[i] + pad, qp.u_max[i] - pad);
    }
  } else {
    u = 0.5 * (qp.u_min + qp.u_max);
  }
  Eigen::VectorXd sigma = (d.rhs - d.g * u).cwiseMax(1e-3);
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(p);

  QpSolution sol;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd r_d = d.h * u + d.q + d.g.transpose() * lambda;
    const Eigen::VectorXd r_p = d.g * u + sigma - d.rhs;
    const double mu = lambda.dot(sigma) / static_cast<double>(p);
    const Eigen::VectorXd gu = d.g * u;

    sol.iterations = it;
    sol.stationarity = r_d.lpNorm<Eigen::Infinity>();
    sol.feasibility = std::max(0.0, (gu - d.rhs).maxCoeff());
    sol.complementarity = lambda.cwiseProduct(sigma).maxCoeff();
    const double rp_norm = r_p.lpNorm<Eigen::Infinity>();
    if (sol.stationarity <= opts.stat_tol && rp_norm <= opts.feas_tol &&
        sol.complementarity <= opts.comp_tol) {
      sol.u = u;
      sol.multipliers = lambda;
      sol.objective = objective_value(qp, u);
      return sol;
    }
    if (lambda.lpNorm<Eigen::Infinity>() > 1e12) {
      throw Infeasible("dual iterate diverged; sampled problem infeasible");
    }

    const Eigen::ArrayXd w = lambda.array() / sigma.array();
    Eigen::MatrixXd hbar = d.h;
    hbar.noalias() += d.g.transpose() * w.matrix().asDiagonal() * d.g;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hbar);
    if (ldlt.info() != Eigen::Success) {
      throw MaxIterations("interior-point normal matrix factorization failed");
    }

    auto direction = [&](const Eigen::VectorXd& r_c) {
      const Eigen::VectorXd tmp =
          (w * r_p.array() - r_c.array() / sigma.array()).matrix();
      const Eigen::VectorXd du =
          ldlt.solve(-(r_d + d.g.transpose() * tmp));
      const Eigen::VectorXd g_du = d.g * du;
      const Eigen::VectorXd dl =
          (w * (g_du + r_p).array() - r_c.array() / sigma.array()).matrix();
      const Eigen::VectorXd ds = -r_p - g_du;
      return std::tuple{du, dl, ds};
    };
    auto max_step = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double a = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
      }
      return a;
    };

    // Affine predictor.
    const Eigen::VectorXd r_c_aff = lambda.cwiseProduct(sigma);
    const auto [du_a, dl_a, ds_a] = direction(r_c_aff);
    const double a_aff =
        std::min(max_step(lambda, dl_a), max_step(sigma, ds_a));
    const double mu_aff = (lambda + a_aff * dl_a)
                              .cwiseMax(0.0)
                              .dot((sigma + a_aff * ds_a).cwiseMax(0.0)) /
                          static_cast<double>(p);
    const double center = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);

    // Centering + corrector.
    const Eigen::VectorXd r_c = lambda.cwiseProduct(sigma) +
                                dl_a.cwiseProduct(ds_a) -
                                Eigen::VectorXd::Constant(p, center * mu);
    const auto [du, dl, ds] = direction(r_c);
    const double a =
        0.995 * std::min(max_step(lambda, dl), max_step(sigma, ds));
    const double step = std::min(1.0, a);
    u += step * du;
    lambda += step * dl;
    sigma += step * ds;
  }
  throw MaxIterations("interior-point iteration limit reached");
}

}  // namespace dertrack

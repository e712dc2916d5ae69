#include "dertrack/feeder.hpp"

#include <Eigen/LU>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace dertrack {

Eigen::VectorXd FeederTopology::zeta() const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(lines.size()));
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (lines[l].x <= 0.0) {
      throw ScenarioError("line " + std::to_string(l) +
                          " has non-positive reactance");
    }
    z[static_cast<Eigen::Index>(l)] = lines[l].r / lines[l].x;
  }
  return z;
}

namespace {

void validate_tree(const FeederTopology& t) {
  const int n = t.node_count;
  if (n <= 0) throw NonRadialTopology("feeder has no non-PCC nodes");
  if (static_cast<int>(t.lines.size()) != n) {
    throw NonRadialTopology("radial feeder needs exactly one line per node: " +
                            std::to_string(t.lines.size()) + " lines for " +
                            std::to_string(n) + " nodes");
  }
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (const Line& l : t.lines) {
    if (l.from < 0 || l.from > n || l.to < 0 || l.to > n) {
      throw NonRadialTopology("line endpoint out of range");
    }
    if (l.from == l.to) throw NonRadialTopology("self-loop line");
    adj[static_cast<std::size_t>(l.from)].push_back(l.to);
    adj[static_cast<std::size_t>(l.to)].push_back(l.from);
  }
  // Connected with L == n  =>  tree rooted at the PCC.
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!bfs.empty()) {
    const int v = bfs.front();
    bfs.pop();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        bfs.push(w);
      }
    }
  }
  if (reached != n + 1) {
    throw NonRadialTopology("feeder graph is not connected to the PCC");
  }
}

}  // namespace

ReducedIncidence build_incidence(const FeederTopology& topology) {
  validate_tree(topology);
  const int n = topology.node_count;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t l = 0; l < topology.lines.size(); ++l) {
    const Line& ln = topology.lines[l];
    const auto col = static_cast<Eigen::Index>(l);
    if (ln.from != 0) m(ln.from - 1, col) = 1.0;
    if (ln.to != 0) m(ln.to - 1, col) = -1.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd m_inv = lu.inverse();
  const double residual =
      (m * m_inv - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-10) {
    throw SingularIncidence("reduced incidence matrix is singular");
  }
  return ReducedIncidence{std::move(m), m_inv};
}

SensitivityModel sensitivity_from_lines(const ReducedIncidence& inc,
                                        const Eigen::VectorXd& r,
                                        const Eigen::VectorXd& x) {
  const Eigen::Index n = inc.m.rows();
  if (r.size() != n || x.size() != n) {
    throw DimensionMismatch("line parameter vectors do not match feeder size");
  }
  if ((r.array() <= 0.0).any() || (x.array() <= 0.0).any()) {
    throw ScenarioError("line parameters must be positive");
  }
  SensitivityModel model;
  model.a = inc.m_inv.transpose() * r.asDiagonal() * inc.m_inv;
  model.b = inc.m_inv.transpose() * x.asDiagonal() * inc.m_inv;
  // Symmetrize away factorization round-off so downstream code can rely on
  // exact symmetry.
  model.a = 0.5 * (model.a + model.a.transpose()).eval();
  model.b = 0.5 * (model.b + model.b.transpose()).eval();
  return model;
}

SensitivityModel sensitivity_from_lines(const FeederTopology& topology) {
  const ReducedIncidence inc = build_incidence(topology);
  const auto L = static_cast<Eigen::Index>(topology.lines.size());
  Eigen::VectorXd r(L), x(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    r[l] = topology.lines[static_cast<std::size_t>(l)].r;
    x[l] = topology.lines[static_cast<std::size_t>(l)].x;
  }
  return sensitivity_from_lines(inc, r, x);
}

Eigen::VectorXd model_voltage(const SensitivityModel& model,
                              const Eigen::VectorXd& p,
                              const Eigen::VectorXd& q) {
  if (p.size() != model.a.rows() || q.size() != model.b.rows()) {
    throw DimensionMismatch("injection vectors do not match model size");
  }
  return (model.a * p + model.b * q).array() + 1.0;
}

std::vector<Line> perturb_lines(const FeederTopology& topology, double sigma2,
                                std::mt19937_64& rng) {
  std::vector<Line> out = topology.lines;
  if (sigma2 <= 0.0) return out;
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));
  for (Line& ln : out) {
    const double zeta = ln.r / ln.x;
    const double x_new = std::max(ln.x + noise(rng), 0.1 * ln.x);
    ln.x = x_new;
    ln.r = zeta * x_new;  // ratio held, so the rated zeta stays valid
  }
  return out;
}

std::pair<Eigen::VectorXd, SensitivityModel> perturb_and_measure(
    const FeederTopology& topology, const MeasurementNoiseSpec& noise,
    std::uint64_t seed, const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  std::mt19937_64 rng(seed);
  FeederTopology perturbed = topology;
  perturbed.lines = perturb_lines(topology, noise.reactance_sigma2, rng);
  SensitivityModel model = sensitivity_from_lines(perturbed);
  Eigen::VectorXd v = model_voltage(model, p, q);
  if (noise.voltage_sigma2 > 0.0) {
    std::normal_distribution<double> vn(0.0, std::sqrt(noise.voltage_sigma2));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += vn(rng);
  }
  return {std::move(v), std::move(model)};
}

FeederData load_feeder_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioLoadError("cannot open feeder file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioLoadError("feeder file " + path + ": " + e.what());
  }
  try {
    FeederData data;
    data.base_kv = j.at("base_kV").get<double>();
    data.base_mva = j.at("base_MVA").get<double>();
    if (data.base_kv <= 0.0 || data.base_mva <= 0.0) {
      throw ScenarioLoadError("feeder base must be positive");
    }
    const double z_base = data.base_kv * data.base_kv / data.base_mva;
    const double s_base_kw = data.base_mva * 1000.0;

    int max_node = 0;
    for (const auto& jl : j.at("lines")) {
      Line ln;
      ln.from = jl.at("from").get<int>();
      ln.to = jl.at("to").get<int>();
      ln.r = jl.at("r_ohm").get<double>() / z_base;
      ln.x = jl.at("x_ohm").get<double>() / z_base;
      max_node = std::max({max_node, ln.from, ln.to});
      data.topology.lines.push_back(ln);
    }
    data.topology.node_count = max_node;

    data.base_load_p = Eigen::VectorXd::Zero(max_node);
    data.base_load_q = Eigen::VectorXd::Zero(max_node);
    if (j.contains("loads")) {
      for (const auto& jl : j.at("loads")) {
        const int node = jl.at("node").get<int>();
        if (node < 1 || node > max_node) {
          throw ScenarioLoadError("load node out of range: " +
                                  std::to_string(node));
        }
        data.base_load_p[node - 1] = jl.at("p_kw").get<double>() / s_base_kw;
        data.base_load_q[node - 1] = jl.at("q_kvar").get<double>() / s_base_kw;
      }
    }
    return data;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioLoadError("feeder file " + path + ": " + e.what());
  }
}

}  // namespace dertrack

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dertrack/baselines.hpp"
#include "dertrack/engine.hpp"
#include "dertrack/metrics.hpp"
#include "dertrack/profiles.hpp"
#include "dertrack/scenario.hpp"

namespace {

using nlohmann::json;

void print_run_summary(const dertrack::RunResult& res) {
  const dertrack::RunStats& st = res.stats;
  std::printf("intervals            %ld\n", st.intervals);
  std::printf("substeps executed    %ld\n", st.substeps_executed);
  std::printf("ldlt factorizations  %ld\n", st.factorizations);
  std::printf("substep halvings     %ld\n", st.halvings);
  std::printf("estimator solves     %ld (held %ld)\n", st.estimator_solves,
              st.estimator_held);
  if (st.oracle_solves > 0) {
    std::printf("reference solves     %ld\n", st.oracle_solves);
  }
  std::printf("median step wall     %.3f ms\n",
              st.median_step_seconds() * 1e3);
  for (std::size_t i = 0; i < res.final_soc.size(); ++i) {
    if (res.final_soc[i] != 0.0) {
      std::printf("final soc[%zu]        %.6f pu*h\n", i, res.final_soc[i]);
    }
  }
  if (res.x_hat.size() > 0 && res.x_true.size() == res.x_hat.size()) {
    const double rel =
        (res.x_hat - res.x_true).norm() / res.x_true.norm();
    std::printf("reactance estimate   rel err %.3e\n", rel);
  }
}

json metrics_json(const dertrack::TrackingMetrics& m, double settle) {
  json out;
  out["mean_err_u"] = m.mean_err_u(settle);
  out["max_err_u"] = m.max_err_u(settle);
  out["mean_err_f"] = m.mean_err_f(settle);
  out["max_err_f"] = m.max_err_f(settle);
  if (m.time_to_track) {
    out["time_to_track_s"] = *m.time_to_track;
  } else {
    out["time_to_track_s"] = nullptr;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracking controller for DER dispatch on radial feeders"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path = "trajectory.csv";
  bool with_oracle = false;
  bool force_fixed = false;
  auto* sim = app.add_subcommand(
      "simulate", "run the continuous tracker on a scenario");
  sim->add_option("scenario", scenario_path, "scenario json")->required();
  sim->add_option("-o,--out", out_path, "trajectory csv path");
  sim->add_flag("--with-oracle", with_oracle,
                "attach the sampled optimizer to every row");
  sim->add_flag("--fixed", force_fixed,
                "override sensitivity_mode to fixed_rated");

  std::string cmp_scenario;
  std::string cmp_dir = ".";
  double sample_period = 1.0;
  double settle = 2.0;
  auto* cmp = app.add_subcommand(
      "compare", "run the tracker and both sampled baselines");
  cmp->add_option("scenario", cmp_scenario, "scenario json")->required();
  cmp->add_option("-o,--out-dir", cmp_dir, "output directory");
  cmp->add_option("--sample-period", sample_period,
                  "baseline sampling period (s)");
  cmp->add_option("--settle", settle,
                  "skip this initial span when averaging errors (s)");

  std::string est_scenario;
  auto* est = app.add_subcommand(
      "estimate", "run with online estimation and report parameter recovery");
  est->add_option("scenario", est_scenario, "scenario json")->required();

  std::string prof_dir = ".";
  std::uint64_t prof_seed = 1;
  double prof_horizon = 60.0;
  auto* gen = app.add_subcommand("gen-profiles",
                                 "write the bundled synthetic profile set");
  gen->add_option("out-dir", prof_dir, "output directory")->required();
  gen->add_option("--seed", prof_seed, "stream seed");
  gen->add_option("--horizon", prof_horizon, "span in seconds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      dertrack::Scenario sc = dertrack::load_scenario(scenario_path);
      if (force_fixed) sc.mode = dertrack::SensitivityMode::fixed_rated;
      dertrack::EngineOptions opts;
      opts.with_oracle = with_oracle;
      const dertrack::RunResult res = dertrack::run(sc, opts);
      dertrack::export_csv(res.record, out_path);
      std::printf("scenario             %s\n", sc.name.c_str());
      print_run_summary(res);
      if (with_oracle) {
        const dertrack::TrackingMetrics m =
            dertrack::compute_metrics(res.record);
        std::printf("mean |u - u*|        %.3e (after %.1f s)\n",
                    m.mean_err_u(settle), settle);
        if (m.time_to_track) {
          std::printf("time to track        %.2f s\n", *m.time_to_track);
        } else {
          std::printf("time to track        not reached\n");
        }
      }
      std::printf("csv                  %s\n", out_path.c_str());
    } else if (cmp->parsed()) {
      dertrack::Scenario sc = dertrack::load_scenario(cmp_scenario);
      if (!sc.events.empty()) {
        throw dertrack::ScenarioLoadError(
            "compare needs an event-free scenario; the sampled baselines "
            "do not replay events");
      }
      std::filesystem::create_directories(cmp_dir);
      dertrack::EngineOptions opts;
      opts.with_oracle = true;
      const dertrack::RunResult pc = dertrack::run(sc, opts);

      dertrack::World world(sc);
      const dertrack::QpProvider truth = world.true_provider();
      const dertrack::TrajectoryRecord pd = dertrack::primal_dual_track(
          truth, sc.horizon_s, sc.integrator.tau, sample_period, {});
      const dertrack::TrajectoryRecord dpc = dertrack::discrete_pc_track(
          truth, sc.horizon_s, sc.integrator.tau, sample_period, {});

      // Score every method against the sampled reference, not against the
      // continuous run.
      dertrack::TrajectoryRecord ref;
      ref.n = pc.record.n;
      ref.tau = pc.record.tau;
      ref.rows.reserve(pc.record.rows.size());
      for (const dertrack::TrajectoryRow& row : pc.record.rows) {
        dertrack::TrajectoryRow r;
        r.t = row.t;
        r.u = row.u_ref;
        r.objective = row.objective_ref;
        ref.rows.push_back(std::move(r));
      }
      const dertrack::TrackingMetrics m_pc =
          dertrack::compute_metrics(pc.record);
      const dertrack::TrackingMetrics m_pd =
          dertrack::compute_metrics(pd, ref);
      const dertrack::TrackingMetrics m_dpc =
          dertrack::compute_metrics(dpc, ref);

      dertrack::export_csv(pc.record, cmp_dir + "/trajectory.csv");
      dertrack::export_csv(pd, cmp_dir + "/primal_dual.csv");
      dertrack::export_csv(dpc, cmp_dir + "/discrete_pc.csv");

      json out;
      out["scenario"] = sc.name;
      out["sample_period_s"] = sample_period;
      out["settle_s"] = settle;
      out["continuous"] = metrics_json(m_pc, settle);
      out["primal_dual"] = metrics_json(m_pd, settle);
      out["discrete_pc"] = metrics_json(m_dpc, settle);
      std::ofstream mf(cmp_dir + "/metrics.json");
      mf << out.dump(1) << '\n';

      std::printf("%-12s %14s %14s\n", "method", "mean|u-u*|", "mean|f-f*|");
      std::printf("%-12s %14.6e %14.6e\n", "continuous",
                  m_pc.mean_err_u(settle), m_pc.mean_err_f(settle));
      std::printf("%-12s %14.6e %14.6e\n", "discrete_pc",
                  m_dpc.mean_err_u(settle), m_dpc.mean_err_f(settle));
      std::printf("%-12s %14.6e %14.6e\n", "primal_dual",
                  m_pd.mean_err_u(settle), m_pd.mean_err_f(settle));
      std::printf("outputs in           %s\n", cmp_dir.c_str());
    } else if (est->parsed()) {
      dertrack::Scenario sc = dertrack::load_scenario(est_scenario);
      sc.mode = dertrack::SensitivityMode::estimated;
      const dertrack::RunResult res = dertrack::run(sc, {});
      print_run_summary(res);
      if (res.x_hat.size() == 0) {
        std::printf("no estimate produced\n");
        return 3;
      }
      for (Eigen::Index l = 0; l < res.x_true.size(); ++l) {
        std::printf("line %2ld  x true %.6e  est %.6e\n",
                    static_cast<long>(l), res.x_true[l], res.x_hat[l]);
      }
    } else if (gen->parsed()) {
      dertrack::generate_profile_set(prof_seed, prof_horizon, prof_dir);
      std::printf("profiles written to %s\n", prof_dir.c_str());
    }
  } catch (const dertrack::ScenarioError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return 2;
  } catch (const dertrack::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 0;
}

#include "dertrack/scenario.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace dertrack {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ProfileSpec parse_profile(const json& j, const fs::path& base_dir) {
  ProfileSpec spec;
  if (j.is_string()) {
    spec.kind = ProfileSpec::Kind::csv;
    spec.csv_path = (base_dir / j.get<std::string>()).string();
    return spec;
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fluctuating") {
    spec.kind = ProfileSpec::Kind::fluctuating;
    spec.base = j.at("base").get<double>();
    spec.trend = j.value("trend", 0.0);
    spec.variation = j.value("variation", 0.03);
  } else if (kind == "ramp") {
    spec.kind = ProfileSpec::Kind::ramp;
    spec.v0 = j.at("v0").get<double>();
    spec.v1 = j.at("v1").get<double>();
  } else if (kind == "constant") {
    spec.kind = ProfileSpec::Kind::constant;
    spec.value = j.at("value").get<double>();
  } else {
    throw ScenarioLoadError("unknown profile kind: " + kind);
  }
  return spec;
}

DeviceKind parse_kind(const std::string& s) {
  if (s == "pv") return DeviceKind::pv;
  if (s == "wt") return DeviceKind::wt;
  if (s == "ess") return DeviceKind::ess;
  throw ScenarioLoadError("unknown device kind: " + s);
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioLoadError("cannot open scenario: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ScenarioLoadError(std::string("scenario parse: ") + e.what());
  }

  const fs::path base_dir = fs::path(path).parent_path();
  Scenario sc;
  try {
    sc.name = j.value("name", fs::path(path).stem().string());
    sc.feeder =
        load_feeder_file((base_dir / j.at("feeder").get<std::string>()).string());
    sc.horizon_s = j.at("horizon_s").get<double>();
    sc.seed = j.value("seed", 1ull);
    if (sc.horizon_s <= 0.0) throw ScenarioLoadError("horizon must be positive");

    for (const auto& jd : j.at("devices")) {
      DeviceSpec dev;
      dev.node = jd.at("node").get<int>();
      dev.kind = parse_kind(jd.at("kind").get<std::string>());
      dev.c_p = jd.value("c_p", 3.0);
      dev.c_q = jd.value("c_q", 1.0);
      dev.cos_theta = jd.value("cos_theta", 0.85);
      ProfileSpec prof;  // storage devices get no availability profile
      if (dev.kind == DeviceKind::ess) {
        const auto& je = jd.at("ess");
        EssParams ess;
        ess.p_ch_max = je.at("p_ch_max").get<double>();
        ess.p_dis_max = je.at("p_dis_max").get<double>();
        ess.eta_c = je.at("eta_c").get<double>();
        ess.eta_d = je.at("eta_d").get<double>();
        ess.w_min = je.at("w_min").get<double>();
        ess.w_max = je.at("w_max").get<double>();
        ess.w_init = je.at("w_init").get<double>();
        ess.horizon_h = je.value("horizon_h", 1.0);
        dev.ess = ess;
      } else {
        prof = parse_profile(jd.at("profile"), base_dir);
      }
      sc.devices.push_back(dev);
      sc.device_profiles.push_back(prof);
    }

    sc.load_profile = parse_profile(j.at("load_profile"), base_dir);

    if (j.contains("noise")) {
      sc.noise.reactance_sigma2 = j["noise"].value("reactance_sigma2", 0.0);
      sc.noise.voltage_sigma2 = j["noise"].value("voltage_sigma2", 0.0);
    }
    const std::string mode = j.value("sensitivity_mode", "estimated");
    if (mode == "estimated") {
      sc.mode = SensitivityMode::estimated;
    } else if (mode == "fixed_rated") {
      sc.mode = SensitivityMode::fixed_rated;
    } else {
      throw ScenarioLoadError("unknown sensitivity_mode: " + mode);
    }
    if (j.contains("estimator")) {
      sc.estimator.window_m = j["estimator"].value("window_m", 1);
      sc.estimator.eta = j["estimator"].value("eta", 1.0);
      if (sc.estimator.window_m < 0) {
        throw ScenarioLoadError("window_m must be non-negative");
      }
    }
    if (j.contains("integrator")) {
      const auto& ji = j["integrator"];
      sc.integrator.tau = ji.value("tau_s", 0.02);
      sc.integrator.substeps = ji.value("substeps", 4);
      sc.integrator.alpha = ji.value("alpha", 100.0);
      sc.integrator.max_halvings = ji.value("max_halvings", 20);
    }
    if (j.contains("schedule")) {
      const auto& js = j["schedule"];
      sc.schedule.s0 = js.value("s0", 2.0);
      sc.schedule.lambda_s = js.value("lambda_s", 10.0);
      sc.schedule.s_min = js.value("s_min", 1e-9);
      sc.schedule.c0 = js.value("c0", 1.0);
      sc.schedule.lambda_c = js.value("lambda_c", 10.0);
      sc.schedule.c_max = js.value("c_max", 1e12);
      sc.schedule.c_event = js.value("c_event", 1e5);
    }
    if (j.contains("limits")) {
      const auto& jl = j["limits"];
      sc.qp_settings.v_min = jl.value("v_min", 0.95);
      sc.qp_settings.v_max = jl.value("v_max", 1.05);
      sc.qp_settings.v_nom = jl.value("v_nom", 1.0);
      sc.qp_settings.gamma = jl.value("gamma", 1.0);
    }

    if (j.contains("events")) {
      double prev = -1.0;
      for (const auto& je : j["events"]) {
        Event ev;
        ev.time_s = je.at("time_s").get<double>();
        if (ev.time_s <= prev) {
          throw ScenarioLoadError("event times must strictly increase");
        }
        if (ev.time_s < 0.0 || ev.time_s > sc.horizon_s) {
          throw ScenarioLoadError("event time outside the horizon");
        }
        prev = ev.time_s;
        const std::string kind = je.at("kind").get<std::string>();
        if (kind == "pv_halt" || kind == "pv_resume") {
          ev.kind = kind == "pv_halt" ? EventKind::pv_halt
                                      : EventKind::pv_resume;
          ev.node = je.at("node").get<int>();
        } else if (kind == "reconfigure") {
          ev.kind = EventKind::reconfigure;
          const double z_base =
              sc.feeder.base_kv * sc.feeder.base_kv / sc.feeder.base_mva;
          for (const auto& jl : je.at("lines")) {
            Line ln;
            ln.from = jl.at("from").get<int>();
            ln.to = jl.at("to").get<int>();
            ln.r = jl.at("r_ohm").get<double>() / z_base;
            ln.x = jl.at("x_ohm").get<double>() / z_base;
            ev.new_lines.push_back(ln);
          }
          // Radiality must hold for the replacement list.
          FeederTopology replacement;
          replacement.node_count = sc.feeder.topology.node_count;
          replacement.lines = ev.new_lines;
          build_incidence(replacement);
        } else {
          throw ScenarioLoadError("unknown event kind: " + kind);
        }
        sc.events.push_back(std::move(ev));
      }
    }

    // Device placement checks against the feeder.
    const int n = sc.feeder.topology.node_count;
    for (const DeviceSpec& dev : sc.devices) {
      if (dev.node < 1 || dev.node > n) {
        throw UnknownNode("device node " + std::to_string(dev.node) +
                          " not on the feeder");
      }
    }
    for (const Event& ev : sc.events) {
      if (ev.kind == EventKind::reconfigure) continue;
      bool found = false;
      for (const DeviceSpec& dev : sc.devices) {
        if (dev.node == ev.node && dev.kind != DeviceKind::ess) found = true;
      }
      if (!found) {
        throw UnknownNode("halt/resume event targets node " +
                          std::to_string(ev.node) +
                          " which has no renewable device");
      }
    }
  } catch (const json::exception& e) {
    throw ScenarioLoadError(std::string("scenario field: ") + e.what());
  }
  return sc;
}

}  // namespace dertrack

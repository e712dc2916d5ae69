#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dertrack/barrier.hpp"
#include "dertrack/devices.hpp"
#include "dertrack/dynamics.hpp"
#include "dertrack/estimator.hpp"
#include "dertrack/feeder.hpp"
#include "dertrack/profiles.hpp"

namespace dertrack {

enum class EventKind { pv_halt, pv_resume, reconfigure };

struct Event {
  double time_s = 0.0;
  EventKind kind = EventKind::pv_halt;
  int node = 0;                  // pv_halt / pv_resume
  std::vector<Line> new_lines;   // reconfigure: complete replacement list
};

enum class SensitivityMode { estimated, fixed_rated };

struct EstimatorConfig {
  int window_m = 1;
  double eta = 1.0;
  EstimatorOptions options;
};

struct Scenario {
  std::string name;
  FeederData feeder;
  double horizon_s = 60.0;
  std::uint64_t seed = 1;

  std::vector<DeviceSpec> devices;
  std::vector<ProfileSpec> device_profiles;  // aligned with devices
  ProfileSpec load_profile;  // multiplier applied to the feeder base loads

  MeasurementNoiseSpec noise;
  SensitivityMode mode = SensitivityMode::estimated;
  EstimatorConfig estimator;
  IntegratorConfig integrator;
  BarrierSchedule schedule;
  QpSettings qp_settings;

  std::vector<Event> events;  // strictly increasing times within the horizon
};

// Reads the scenario JSON; feeder and csv profile paths resolve relative to
// the scenario file's directory. Validates device placement, event ordering
// and reconfiguration radiality.
Scenario load_scenario(const std::string& path);

}  // namespace dertrack

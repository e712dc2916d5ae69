#include "dertrack/profiles.hpp"

#include <cmath>
#include <filesystem>
#include <random>

namespace dertrack {

std::uint64_t stream_seed(std::uint64_t seed, const std::string& tag) {
  // splitmix-style mix of the seed with a stable tag hash
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

SampledSeries synthesize(const ProfileSpec& spec, double horizon,
                         std::uint64_t seed, const std::string& tag,
                         double spacing_s) {
  const auto samples = static_cast<std::size_t>(
      std::lround(horizon / spacing_s)) + 1;
  SampledSeries out;
  out.t.resize(samples);
  out.value.resize(samples);

  std::mt19937_64 rng(stream_seed(seed, tag));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Band-limited fluctuation: fixed periods, seeded amplitudes and phases.
  constexpr double periods[4] = {7.0, 11.0, 17.0, 29.0};
  double amp[4], phase[4];
  for (int j = 0; j < 4; ++j) {
    amp[j] = 0.25 + 0.75 * unit(rng);
    phase[j] = 2.0 * M_PI * unit(rng);
  }
  double amp_sum = amp[0] + amp[1] + amp[2] + amp[3];

  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) * spacing_s;
    double v = 0.0;
    switch (spec.kind) {
      case ProfileSpec::Kind::constant:
        v = spec.value;
        break;
      case ProfileSpec::Kind::ramp:
        v = spec.v0 + (spec.v1 - spec.v0) * (t / horizon);
        break;
      case ProfileSpec::Kind::fluctuating: {
        double wiggle = 0.0;
        for (int j = 0; j < 4; ++j) {
          wiggle += amp[j] * std::sin(2.0 * M_PI * t / periods[j] + phase[j]);
        }
        wiggle *= spec.variation / amp_sum;
        const double drift = spec.trend * (t / horizon - 0.5);
        v = spec.base * (1.0 + drift + wiggle);
        break;
      }
      case ProfileSpec::Kind::csv:
        throw ScenarioError("csv profiles are read, not synthesized");
    }
    out.t[i] = t;
    out.value[i] = std::max(v, 0.0);
  }
  return out;
}

Interpolant materialize(const ProfileSpec& spec, double horizon,
                        std::uint64_t seed, const std::string& tag) {
  if (spec.kind == ProfileSpec::Kind::csv) {
    return Interpolant(read_series_csv(spec.csv_path));
  }
  return Interpolant(synthesize(spec, horizon, seed, tag));
}

void generate_profile_set(std::uint64_t seed, double horizon,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const int pv_nodes[] = {2, 6, 11, 16, 19, 24, 28};
  const int wt_nodes[] = {13, 26};

  for (int node : pv_nodes) {
    ProfileSpec spec;
    spec.kind = ProfileSpec::Kind::fluctuating;
    spec.base = node == 28 ? 0.06 : 0.035;
    spec.trend = 0.08;
    spec.variation = 0.04;
    const std::string tag = "pv:" + std::to_string(node);
    write_series_csv(out_dir + "/pv" + std::to_string(node) + ".csv",
                     synthesize(spec, horizon, seed, tag));
  }
  for (int node : wt_nodes) {
    ProfileSpec spec;
    spec.kind = ProfileSpec::Kind::fluctuating;
    spec.base = 0.03;
    spec.trend = -0.05;
    spec.variation = 0.06;
    const std::string tag = "wt:" + std::to_string(node);
    write_series_csv(out_dir + "/wt" + std::to_string(node) + ".csv",
                     synthesize(spec, horizon, seed, tag));
  }
  ProfileSpec load;
  load.kind = ProfileSpec::Kind::fluctuating;
  load.base = 0.55;
  load.trend = 0.04;
  load.variation = 0.02;
  write_series_csv(out_dir + "/load.csv",
                   synthesize(load, horizon, seed, "load"));
}

}  // namespace dertrack

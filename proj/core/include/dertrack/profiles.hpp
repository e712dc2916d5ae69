#pragma once

#include <cstdint>
#include <string>

#include "dertrack/signals.hpp"

namespace dertrack {

// Synthetic signal descriptors. `fluctuating` is a slow trend plus a
// band-limited sum of sinusoids whose amplitudes/phases derive from the
// seed and the tag, so every profile in a scenario gets an independent but
// reproducible stream.
struct ProfileSpec {
  enum class Kind { csv, fluctuating, ramp, constant };
  Kind kind = Kind::constant;

  std::string csv_path;  // kind == csv

  double base = 0.0;        // fluctuating: mean level
  double trend = 0.0;       // fluctuating: total relative drift over horizon
  double variation = 0.03;  // fluctuating: relative fluctuation amplitude

  double v0 = 0.0, v1 = 0.0;  // ramp endpoints

  double value = 0.0;  // constant
};

// Stable per-purpose RNG seed: mixes the base seed with a tag hash so the
// profile, plant-parameter and measurement-noise streams are independent.
std::uint64_t stream_seed(std::uint64_t seed, const std::string& tag);

// Samples at spacing_s (default 1 s) spanning [0, horizon].
SampledSeries synthesize(const ProfileSpec& spec, double horizon,
                         std::uint64_t seed, const std::string& tag,
                         double spacing_s = 1.0);

// Materializes spec to an interpolant; csv specs read their file.
Interpolant materialize(const ProfileSpec& spec, double horizon,
                        std::uint64_t seed, const std::string& tag);

// Writes the standard profile set for the bundled feeder scenarios
// (renewable availability per device node plus the load multiplier).
void generate_profile_set(std::uint64_t seed, double horizon,
                          const std::string& out_dir);

}  // namespace dertrack

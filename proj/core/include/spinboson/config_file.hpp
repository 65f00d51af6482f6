#pragma once

#include <string>

#include "model.hpp"

namespace spinboson {

// Flat INI-style configuration with sections [network], [site.<i>],
// [hopping], and [simulation]. Keys mirror the parameter field names;
// unknown sections or keys are errors, as are duplicate definitions.
//
//   [network]
//   n_sites = 2
//
//   [site.0]
//   omega_c = 0.0
//   omega_s = 0.0
//   g = 1.0
//   kappa = 20.0
//   gamma = 0.0
//   nbar = 0.0
//   spin_s = inf            # half-integer or "inf"
//   drive_amplitude = 70.710678118654755
//   drive_ramp_time = 0.0
//
//   [hopping]
//   0 1 = 1.0               # symmetric bond between sites 0 and 1
//
//   [simulation]
//   dt = 2e-4               # omit for the network default
//   t_final = 10.0
//   n_trajectories = 1000
//   master_seed = 12345
//   regularization_epsilon = 1e-8
//   initial_spin_offset = 1e-6 1e-6
//   breakdown_threshold = 0.05
//   divergence_radius = 1e6
//   spike_policy = exclude_after_breakdown
struct ParsedConfig {
    NetworkSpec network;
    SimulationConfig simulation;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig load_config(const std::string& path);

// Canonical text form of a configuration; parses back to the same values.
std::string render_config(const NetworkSpec& spec, const SimulationConfig& config);

} // namespace spinboson

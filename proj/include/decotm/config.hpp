#pragma once

// Experiment configuration: flat `key = value` text with one [section] per
// subcommand. Unknown sections or keys are rejected with the offending line.
//
//   # ring noise, three field strengths
//   [fig12]
//   family = planar_ring
//   B0_tau = 0.1
//   b0_over_B0_min = 0.1
//   b0_over_B0_max = 10
//   b0_over_B0_count = 41
//   b0_over_B0_spacing = log

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace decotm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Spacing { Linear, Log };

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  Spacing spacing = Spacing::Linear;

  std::vector<double> points() const;
};

struct SweepConfig {
  std::string section;  // fig12 | fig3 | transition | verify

  std::string family = "planar_ring";
  std::vector<std::string> families{"planar_ring", "sphere_shell", "axis_flip"};
  std::vector<double> B0_tau{0.1};
  std::vector<double> b0_tau{0.01};
  Grid b0_over_B0{0.1, 10.0, 41, Spacing::Log};
  Grid r{0.0, 1.0, 11, Spacing::Linear};
  Grid anisotropy{0.0, 1.0, 101, Spacing::Linear};
  std::vector<double> correlated_r{0.5};
  double transient_cut = 0.5;
  int m = 200;
  std::size_t trajectories = 200000;
  std::uint64_t seed = 20240601;
  int quad_order = 64;
  std::string output;
};

/// Defaults for a subcommand (these reproduce the figure sweeps at desk scale).
SweepConfig default_config(const std::string& section);

/// Parses `text` and returns the configuration for `section`, starting from its defaults.
/// Other known sections in the same file are validated but otherwise ignored.
SweepConfig parse_config(const std::string& text, const std::string& section);

SweepConfig load_config(const std::string& path, const std::string& section);

/// Range and consistency checks; throws ConfigError.
void validate(const SweepConfig& cfg);

}  // namespace decotm

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trtrom/mlqd.hpp"

namespace trtrom {

/// Run configuration. Defaults reproduce the Fleck-Cummings test.
struct RunConfig {
  // [domain]
  double length = 6.0;
  std::size_t cells = 60;
  // [angles]
  std::size_t n_per_half = 4;
  // [groups]
  std::vector<double> group_boundaries = GroupStructure::fleck_cummings().boundaries();
  // [time]
  double dt = 0.02;
  double t_end = 6.0;
  std::vector<double> steps;  // overrides dt / t_end when non-empty
  std::vector<double> stage_bounds{0.3, 1.2};
  // [material]
  double opacity_coefficient = 27.0;
  double cv_factor = 0.5917;  // c_v = cv_factor a_R T_in^3
  std::optional<double> cv;   // GJ cm^-3 keV^-1, overrides cv_factor
  double light_speed = PhysConstants{}.c;
  double a_rad = PhysConstants{}.a_rad;
  // [boundary]
  double inflow_temperature = 1.0;
  double initial_temperature = 0.001;
  // [solver]
  SolverSettings solver;
  // [rom]
  std::optional<double> rom_eps;
  std::vector<std::size_t> rom_ranks;
  // [output]
  std::filesystem::path output_dir = "out";

  static RunConfig fleck_cummings() { return {}; }
  /// INI text with [section] headers and key = value lines. Unknown
  /// sections or keys are rejected.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  /// Validates every field; throws ConfigError naming the offending key.
  void validate() const;
  Problem problem() const;
  std::string to_ini() const;
};

/// TRTROM_OUT when set, otherwise the configured directory.
std::filesystem::path resolve_output_dir(const RunConfig& config);

}  // namespace trtrom

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/network.hpp"
#include "qmem/signal.hpp"
#include "qmem/source.hpp"

namespace qmem {

enum class Experiment {
  SingleMemristor,
  Cascade,
  WindowSweep,
  InputWaveformGallery,
  VisibilityStudy,
  PurityFitStudy,
  OracleCrossCheck,
  SeriesParallelCheck,
};

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

struct HomodyneSettings {
  SourceModel source{};
  double efficiency = 1.0;
  std::size_t phase_steps = 100;
  std::vector<double> beta_sq_points{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> reflectivities{0.5};
  double noise_sigma = 0.01;
};

struct OracleGrid {
  std::vector<double> beta_sq{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> reflectivities{0.0, 0.3, 0.7};
  std::vector<double> phases{0.0, 1.5707963267948966, 3.141592653589793};
};

/// Fully validated experiment description. All times are in seconds; window
/// fractions have been resolved against the drive period.
struct Scenario {
  Experiment experiment = Experiment::SingleMemristor;
  std::uint64_t seed = 0;
  std::string output_dir;
  SignalSpec signal = SignalSpec::sin_squared(400.0);
  ChainConfig chain;
  double dt = 0.0;
  double duration = 0.0;
  HomodyneSettings homodyne;
  OracleGrid oracle;
  /// Absolute window profiles for sweeps (one entry per configuration).
  std::vector<std::vector<double>> sweep_profiles;
  /// Non-fatal findings, e.g. latency above the experiment-faithful bound.
  std::vector<std::string> warnings;
};

/// Parses and validates a JSON scenario. Throws ConfigError listing every
/// problem found, each prefixed with its key path; a missing or malformed
/// file is reported the same way.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(std::string_view text);

/// Sorted-key JSON of the resolved scenario, excluding the output directory.
std::string canonical_form(const Scenario& scenario);

/// FNV-1a 64 of canonical_form, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

}  // namespace qmem

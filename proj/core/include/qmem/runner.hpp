#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qmem/scenario.hpp"

namespace qmem {

struct EmittedFile {
  std::string name;  ///< relative to the output directory
  std::size_t rows = 0;
};

struct RunManifest {
  std::string tool_version;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  double wall_clock_s = 0.0;
  std::string experiment;
  std::vector<EmittedFile> files;
  std::vector<std::string> warnings;
  /// Experiment-specific scalar results (e.g. max oracle deviation).
  std::vector<std::pair<std::string, double>> results;
};

struct RunOptions {
  /// Falls back to the scenario's output_dir, then $QMEMSIM_OUT, then "out".
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  /// Also emit noise-free, zero-latency "_theory" companions.
  bool theory = false;
};

std::string tool_version();

std::filesystem::path resolve_output_dir(const Scenario& scenario, const RunOptions& options);

/// Runs the scenario, writes its CSV artifacts and finally manifest.txt.
RunManifest run(Scenario scenario, const RunOptions& options = {});

std::string format_manifest(const RunManifest& manifest);

}  // namespace qmem

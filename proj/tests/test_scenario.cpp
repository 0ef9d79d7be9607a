#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "qmem/error.hpp"
#include "qmem/scenario.hpp"

using namespace qmem;
using doctest::Approx;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("minimal single memristor scenario") {
  const auto s = parse_scenario_text(R"({
    "experiment": "single_memristor",
    "signal": {"waveform": "sin_squared", "period_s": 400},
    "chain": [{"window_fraction": 0.3}]
  })");
  CHECK(s.experiment == Experiment::SingleMemristor);
  REQUIRE(s.chain.nodes.size() == 1);
  CHECK(s.chain.nodes[0].integration_window == Approx(120.0));
  CHECK(s.chain.nodes[0].exposure == 4.0);
  CHECK(s.dt == 4.0);
  CHECK(s.duration == Approx(3.0 * 400.0));
  CHECK(s.signal.waveform() == Waveform::SinSquared);
  CHECK(s.warnings.empty());
}

TEST_CASE("window_fraction overrides integration_window_s") {
  const auto s = parse_scenario_text(R"({"experiment": "cascade",
    "chain": [{"integration_window_s": 50, "window_fraction": 0.5}, {"integration_window_s": 50}]})");
  CHECK(s.chain.nodes[0].integration_window == Approx(200.0));
  CHECK(s.chain.nodes[1].integration_window == 50.0);
}

TEST_CASE("validation errors are path qualified and collected") {
  SUBCASE("exposure above window") {
    const auto e = errors_of(R"({"experiment": "single_memristor",
      "chain": [{"integration_window_s": 2, "exposure_s": 4}]})");
    CHECK(mentions(e, "chain[0].exposure_s"));
  }
  SUBCASE("unknown waveform lists the alternatives") {
    const auto e = errors_of(R"({"experiment": "cascade", "signal": {"waveform": "square"}})");
    REQUIRE(e.size() == 1);
    CHECK(mentions(e, "signal.waveform"));
    CHECK(mentions(e, "sin_squared, abs_sin, triangle, sawtooth, raised_cosine, constant"));
  }
  SUBCASE("several problems at once") {
    const auto e = errors_of(R"({"experiment": "nope", "colour": 1,
      "signal": {"period_s": -1},
      "detection": {"efficiency": 2, "estimator": "both"},
      "homodyne": {"beta_sq_points": [0.1, 0.1, 0.5], "reflectivities": [0.1, 0.2, 0.3]},
      "chain": [{"latency_s": -1, "init_policy": "warm"}]})");
    CHECK(mentions(e, "experiment: unknown experiment 'nope'"));
    CHECK(mentions(e, "colour: unknown key"));
    CHECK(mentions(e, "signal.period_s"));
    CHECK(mentions(e, "detection.efficiency"));
    CHECK(mentions(e, "detection.estimator"));
    CHECK(mentions(e, "homodyne.beta_sq_points"));
    CHECK(mentions(e, "homodyne.reflectivities"));
    CHECK(mentions(e, "chain[0].latency_s"));
    CHECK(mentions(e, "chain[0].init_policy"));
  }
  SUBCASE("type errors") {
    const auto e = errors_of(R"({"experiment": "cascade", "seed": -3, "grid": {"dt_s": "fast"}, "chain": {}})");
    CHECK(mentions(e, "seed"));
    CHECK(mentions(e, "grid.dt_s: expected a number"));
    CHECK(mentions(e, "chain: expected a non-empty array"));
  }
  SUBCASE("experiment specific") {
    CHECK(mentions(errors_of(R"({"experiment": "single_memristor", "chain": [{}, {}]})"), "exactly one"));
    CHECK(mentions(errors_of(R"({"experiment": "window_sweep"})"), "sweep"));
    CHECK(mentions(errors_of(R"({"experiment": "cascade", "chain": [{}, {}], "detection": [{}]})"),
                   "detection"));
    CHECK(mentions(errors_of(R"({"experiment": "cascade", "grid": {"dt_s": 8}})"), "grid.dt_s"));
    CHECK(mentions(errors_of(R"({})"), "experiment: missing"));
  }
  SUBCASE("malformed text") {
    CHECK(mentions(errors_of("{\"experiment\": "), "<parse>"));
    CHECK(mentions(errors_of("[1, 2]"), "expected a JSON object"));
  }
}

TEST_CASE("missing file") {
  try {
    parse_scenario("/nonexistent/scenario.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.errors(), "cannot open"));
  }
}

TEST_CASE("file errors carry the file name") {
  const auto path = std::filesystem::temp_directory_path() / "qmem_scenario_test_bad.json";
  std::ofstream(path) << R"({"experiment": "cascade", "signal": {"waveform": "square"}})";
  try {
    parse_scenario(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.errors(), path.string() + ": signal.waveform"));
  }
  std::filesystem::remove(path);
}

TEST_CASE("latency beyond the faithful bound is a warning") {
  const auto s = parse_scenario_text(R"({"experiment": "single_memristor", "chain": [{"latency_s": 1}]})");
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.warnings[0].find("chain[0].latency_s") == 0);
}

TEST_CASE("per-node detection and sweep profiles") {
  const auto s = parse_scenario_text(R"({"experiment": "window_sweep", "seed": 12,
    "chain": [{"exposure_s": 4}],
    "detection": [{"shot_noise": true, "pulse_rate_hz": 1000}],
    "sweep": {"window_fractions": [0.1, 0.3], "profiles": [[0.2, 0.4]], "chain_lengths": [2]}})");
  REQUIRE(s.chain.detection.size() == 1);
  CHECK(s.chain.detection[0].shot_noise);
  CHECK(s.chain.detection[0].seed == 12);
  REQUIRE(s.sweep_profiles.size() == 4);
  CHECK(s.sweep_profiles[0] == std::vector<double>{40.0});
  CHECK(s.sweep_profiles[2].size() == 2);
  CHECK(s.sweep_profiles[3][1] == Approx(360.0));
  CHECK(s.duration == Approx(3.0 * 400.0));
}

TEST_CASE("hash is stable under semantically identical configs") {
  const auto a = parse_scenario_text(R"({"experiment": "single_memristor", "seed": 4,
    "signal": {"period_s": 400, "waveform": "sin_squared"},
    "chain": [{"window_fraction": 0.3, "exposure_s": 4}], "output_dir": "x"})");
  const auto b = parse_scenario_text(R"({
      "chain": [{"exposure_s": 4.0, "integration_window_s": 120}],
      "signal": {"waveform": "sin_squared", "period_s": 400.0},
      "seed": 4, "output_dir": "elsewhere",
      "experiment": "single_memristor"})");
  const auto c = parse_scenario_text(R"({"experiment": "single_memristor", "seed": 5,
    "chain": [{"window_fraction": 0.3}]})");
  CHECK(canonical_form(a) == canonical_form(b));
  CHECK(scenario_hash(a) == scenario_hash(b));
  CHECK(scenario_hash(a) != scenario_hash(c));
  CHECK(scenario_hash(a).size() == 16);
  CHECK(canonical_form(a).find("output_dir") == std::string::npos);
}

TEST_CASE("experiment names round trip") {
  for (int e = 0; e < 8; ++e) {
    const auto exp = static_cast<Experiment>(e);
    CHECK(parse_experiment(to_string(exp)) == exp);
  }
}

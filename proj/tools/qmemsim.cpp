#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qmem/checks.hpp"
#include "qmem/error.hpp"
#include "qmem/runner.hpp"
#include "qmem/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kRuntime = 2, kCheckFailed = 3 };

int do_run(const std::string& path, const std::string& out_dir, std::optional<std::uint64_t> seed,
           bool theory) {
  qmem::Scenario scenario;
  try {
    scenario = qmem::parse_scenario(path);
  } catch (const qmem::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "config error: " << msg << "\n";
    return kConfig;
  }
  for (const auto& w : scenario.warnings) std::cerr << "warning: " << w << "\n";

  qmem::RunOptions options;
  if (!out_dir.empty()) options.output_dir = out_dir;
  options.seed = seed;
  options.theory = theory;
  try {
    const auto manifest = qmem::run(scenario, options);
    std::cout << "wrote " << manifest.files.size() << " files to "
              << qmem::resolve_output_dir(scenario, options).string() << "\n";
    for (const auto& [key, value] : manifest.results) std::cout << key << "=" << value << "\n";
  } catch (const qmem::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "config error: " << msg << "\n";
    return kConfig;
  } catch (const qmem::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

int do_check(const std::string& suite) {
  if (!qmem::checks::is_suite(suite)) {
    std::cerr << "unknown suite '" << suite << "'; available:";
    for (const auto& name : qmem::checks::suite_names()) std::cerr << " " << name;
    std::cerr << "\n";
    return kConfig;
  }
  bool all_pass = true;
  for (const auto& r : qmem::checks::run_suite(suite)) {
    std::cout << qmem::checks::format_result(r) << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optical quantum memristor simulator"};
  app.set_version_flag("--version", qmem::tool_version());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file and write CSV artifacts");
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool theory = false;
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (default: scenario output_dir, $QMEMSIM_OUT, ./out)");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--theory", theory, "Also write noise-free, zero-latency companion files");

  auto* check = app.add_subcommand("check", "Run a built-in acceptance suite");
  std::string suite;
  check->add_option("suite", suite, "asymptotic, conservation, oracle, visibility, purity, hysteresis, "
                                    "equivalence, determinism or all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*run) return do_run(scenario_path, out_dir, seed, theory);
  return do_check(suite);
}

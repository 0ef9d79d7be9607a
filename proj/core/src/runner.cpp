#include "qmem/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>

#include "qmem/csv.hpp"
#include "qmem/error.hpp"
#include "qmem/fock.hpp"
#include "qmem/homodyne.hpp"
#include "qmem/network.hpp"

#ifndef QMEM_VERSION
#define QMEM_VERSION "0.0.0"
#endif

namespace qmem {

namespace fs = std::filesystem;

namespace {

std::string numbered(const std::string& prefix, std::size_t n) {
  return prefix + std::to_string(n);
}

class Output {
 public:
  Output(fs::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {}

  CsvWriter open(const std::string& name, std::vector<std::string> header) {
    return CsvWriter(dir_ / name, std::move(header));
  }

  void done(const CsvWriter& writer) {
    manifest_.files.push_back({writer.path().filename().string(), writer.rows()});
  }

  void text(const std::string& name, const std::string& body) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << body;
    std::size_t lines = 0;
    for (char c : body) lines += c == '\n';
    manifest_.files.push_back({name, lines});
  }

  void warn(std::string message) { manifest_.warnings.push_back(std::move(message)); }
  void result(std::string key, double value) { manifest_.results.emplace_back(std::move(key), value); }

 private:
  fs::path dir_;
  RunManifest& manifest_;
};

void write_trace(Output& out, const Trace& trace, const std::string& name) {
  const std::size_t n = trace.nodes();
  std::vector<std::string> header{"t", "n_in"};
  for (const char* prefix : {"R_", "n_refl_", "n_trans_"})
    for (std::size_t i = 1; i <= n; ++i) header.push_back(numbered(prefix, i));
  auto csv = out.open(name, std::move(header));
  std::vector<double> row(2 + 3 * n);
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    row[0] = trace.t[k];
    row[1] = trace.n_in[k];
    for (std::size_t i = 0; i < n; ++i) {
      row[2 + i] = trace.reflectivity[i][k];
      row[2 + n + i] = trace.reflected[i][k];
      row[2 + 2 * n + i] = trace.transmitted[i][k];
    }
    csv.row(row);
  }
  out.done(csv);
}

void write_loop(Output& out, const HysteresisLoop& loop, const std::string& name) {
  auto csv = out.open(name, {"phase_index", "n_in", "n_out"});
  for (std::size_t k = 0; k < loop.x.size(); ++k)
    csv.row({static_cast<double>(k), loop.x[k], loop.y[k]});
  out.done(csv);
}

void trace_experiment(Output& out, const Scenario& s, ChainConfig chain, const std::string& suffix) {
  const SamplingGrid grid(s.dt, s.duration);
  const Trace trace = run_chain(chain, s.signal, grid);
  write_trace(out, trace, "trace" + suffix + ".csv");
  if (!trace.steady_state_reached)
    out.warn("trace" + suffix + ": run shorter than max window plus one drive period");
  for (std::size_t i = 0; i < trace.nodes(); ++i) {
    try {
      const auto loop = extract_loop(trace, s.signal.period(), i);
      write_loop(out, loop, "loop_node" + std::to_string(i + 1) + suffix + ".csv");
      out.result("loop_area_node" + std::to_string(i + 1) + suffix, loop.area);
    } catch (const InsufficientDataError& e) {
      out.warn("loop_node" + std::to_string(i + 1) + suffix + ": " + e.what());
      break;
    }
  }
}

void sweep_experiment(Output& out, const Scenario& s, ChainConfig chain, const std::string& suffix) {
  const SamplingGrid grid(s.dt, s.duration);
  const auto rows = sweep_windows(chain, s.sweep_profiles, s.signal, grid);
  auto csv = out.open("sweep" + suffix + ".csv", {"config_id", "area"});
  for (const auto& row : rows) {
    const double area = row.area;
    csv.row(row.config_id, std::span<const double>(&area, 1));
    write_loop(out, row.loop, "loop_" + row.config_id + suffix + ".csv");
  }
  out.done(csv);
}

void gallery_experiment(Output& out, const Scenario& s, ChainConfig chain, const std::string& suffix) {
  const SamplingGrid grid(s.dt, s.duration);
  auto csv = out.open("gallery" + suffix + ".csv", {"config_id", "area"});
  for (Waveform w : {Waveform::SinSquared, Waveform::AbsSin, Waveform::Triangle, Waveform::Sawtooth,
                     Waveform::RaisedCosine}) {
    const SignalSpec drive(w, s.signal.period(), s.signal.phase_offset());
    const Trace trace = run_chain(chain, drive, grid);
    const std::string name(to_string(w));
    try {
      const auto loop = extract_loop(trace, drive.period(), trace.nodes() - 1);
      const double area = loop.area;
      csv.row(name, std::span<const double>(&area, 1));
      write_loop(out, loop, "loop_" + name + suffix + ".csv");
    } catch (const InsufficientDataError& e) {
      out.warn(name + ": " + e.what());
    }
  }
  out.done(csv);
}

SourceModel source_at(const SourceModel& base, double beta_sq) {
  SourceModel s = base;
  s.beta_sq = beta_sq;
  return s;
}

void visibility_experiment(Output& out, const Scenario& s) {
  const auto& h = s.homodyne;
  {
    auto csv = out.open("visibility.csv", {"beta_sq", "visibility", "sigma"});
    for (double b : h.beta_sq_points)
      csv.row({b, homodyne::visibility_chain(source_at(h.source, b), h.reflectivities, h.efficiency), 0.0});
    out.done(csv);
  }
  {
    std::vector<double> phases(h.phase_steps);
    for (std::size_t k = 0; k < h.phase_steps; ++k)
      phases[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(h.phase_steps - 1);
    const auto fringes = homodyne::fringe_trace(h.source, h.reflectivities, phases, h.efficiency);
    auto csv = out.open("fringes.csv", {"phase", "channel_a", "channel_b"});
    for (std::size_t k = 0; k < phases.size(); ++k)
      csv.row({fringes.phase[k], fringes.channel_a[k], fringes.channel_b[k]});
    out.done(csv);
    out.result("fringe_visibility_a", fringes.visibility_a);
    out.result("fringe_visibility_b", fringes.visibility_b);
  }
  // Visibility along the final drive cycle of the memristor chain.
  const SamplingGrid grid(s.dt, s.duration);
  const Trace trace = run_chain(s.chain, s.signal, grid);
  const auto period_steps = static_cast<std::size_t>(std::llround(s.signal.period() / s.dt));
  if (trace.steps() <= period_steps) {
    out.warn("visibility_loop: run shorter than one drive period");
    return;
  }
  const std::size_t first = trace.steps() - period_steps - 1;
  const auto nu = homodyne::visibility_along_trace(trace, h.source, h.efficiency, 0, first);
  auto csv = out.open("visibility_loop.csv", {"phase_index", "beta_sq", "visibility"});
  for (std::size_t k = 0; k < nu.size(); ++k)
    csv.row({static_cast<double>(k), trace.n_in[first + k], nu[k]});
  out.done(csv);
  const auto loop = make_loop(std::span(trace.n_in).subspan(first), nu);
  out.result("visibility_loop_width", pinch_check(loop).max_branch_gap);
}

void purity_experiment(Output& out, const Scenario& s, bool theory) {
  const auto& h = s.homodyne;
  std::vector<double> transmissivities;
  double net = 1.0;
  for (double r : h.reflectivities) net *= 1.0 - r;
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  homodyne::VisibilityCurve curve;
  std::vector<double> exact;
  for (double b : h.beta_sq_points) {
    const double nu = homodyne::visibility_realistic(source_at(h.source, b), net, h.efficiency);
    exact.push_back(nu);
    const double sigma = h.noise_sigma;
    curve.push_back({b, nu + sigma * noise(rng), sigma > 0.0 ? std::optional(sigma) : std::nullopt});
  }
  auto csv = out.open("visibility.csv", {"beta_sq", "visibility", "sigma"});
  for (const auto& p : curve) csv.row({p.beta_sq, p.visibility, p.sigma.value_or(0.0)});
  out.done(csv);
  if (theory) {
    auto companion = out.open("visibility_theory.csv", {"beta_sq", "visibility", "sigma"});
    for (std::size_t k = 0; k < curve.size(); ++k) companion.row({curve[k].beta_sq, exact[k], 0.0});
    out.done(companion);
  }
  const auto fit = homodyne::fit_purity(curve, h.source.v_hom);
  out.text("fit_report.txt", homodyne::format_fit_report(fit, h.source.v_hom));
  out.result("purity", fit.purity);
  out.result("purity_stderr", fit.purity_stderr);
}

void oracle_experiment(Output& out, const Scenario& s) {
  const auto& g = s.oracle;
  double worst = 0.0;
  {
    auto csv = out.open("oracle_click.csv",
                        {"beta_sq", "reflectivity", "phase", "closed_form", "oracle", "abs_diff"});
    for (double b : g.beta_sq)
      for (double r : g.reflectivities)
        for (double phi : g.phases) {
          const double refl[] = {r};
          const SourceModel src{b, 1.0, 1.0};
          const double enumerated =
              fock::two_pulse_pipeline(src, refl, phi, 1.0).at({fock::kShortArm, 1});
          const double closed = homodyne::click_probability_single(b, r, phi);
          const double diff = std::abs(enumerated - closed);
          worst = std::max(worst, diff);
          csv.row({b, r, phi, closed, enumerated, diff});
        }
    out.done(csv);
  }
  {
    auto csv = out.open("oracle_visibility.csv",
                        {"beta_sq", "r1", "r2", "closed_form", "oracle", "abs_diff"});
    for (double b : g.beta_sq) {
      const SourceModel src{b, 1.0, 1.0};
      for (double r1 : g.reflectivities) {
        const double one[] = {r1};
        const double closed1 = homodyne::visibility_single(b, 1.0 - r1);
        const double enum1 = homodyne::visibility_chain(src, one, 1.0);
        worst = std::max(worst, std::abs(closed1 - enum1));
        csv.row({b, r1, 0.0, closed1, enum1, std::abs(closed1 - enum1)});
        for (double r2 : g.reflectivities) {
          const double two[] = {r1, r2};
          const double closed2 = homodyne::visibility_double(b, 1.0 - r1, 1.0 - r2);
          const double enum2 = homodyne::visibility_chain(src, two, 1.0);
          worst = std::max(worst, std::abs(closed2 - enum2));
          csv.row({b, r1, r2, closed2, enum2, std::abs(closed2 - enum2)});
        }
      }
    }
    out.done(csv);
  }
  out.result("max_deviation", worst);
}

void equivalence_experiment(Output& out, const Scenario& s) {
  const auto& g = s.oracle;
  const auto& h = s.homodyne;
  double worst = 0.0;
  auto csv = out.open("equivalence.csv", {"nodes", "r1", "r2", "beta_sq", "phase", "outcome",
                                          "series", "parallel", "abs_diff"});
  auto emit = [&](std::span<const double> refl, double b, double phi) {
    const auto report = series_parallel_equivalence(refl, source_at(h.source, b), phi, h.efficiency);
    worst = std::max(worst, report.max_abs_diff);
    for (std::size_t o = 0; o < report.series.size(); ++o)
      csv.row({static_cast<double>(refl.size()), refl[0], refl.size() > 1 ? refl[1] : 0.0, b, phi,
               static_cast<double>(o), report.series[o], report.parallel[o],
               std::abs(report.series[o] - report.parallel[o])});
  };
  for (double b : g.beta_sq)
    for (double phi : g.phases)
      for (double r1 : g.reflectivities) {
        const double one[] = {r1};
        emit(one, b, phi);
        for (double r2 : g.reflectivities) {
          const double two[] = {r1, r2};
          emit(two, b, phi);
        }
      }
  out.done(csv);
  out.result("max_abs_diff", worst);
}

}  // namespace

std::string tool_version() { return QMEM_VERSION; }

fs::path resolve_output_dir(const Scenario& scenario, const RunOptions& options) {
  if (options.output_dir) return *options.output_dir;
  if (!scenario.output_dir.empty()) return scenario.output_dir;
  if (const char* env = std::getenv("QMEMSIM_OUT"); env && *env) return env;
  return "out";
}

RunManifest run(Scenario scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (options.seed) {
    scenario.seed = *options.seed;
    for (auto& d : scenario.chain.detection) d.seed = scenario.seed;
  }
  scenario.chain.validate();

  RunManifest manifest;
  manifest.tool_version = tool_version();
  manifest.scenario_hash = scenario_hash(scenario);
  manifest.seed = scenario.seed;
  manifest.experiment = std::string(to_string(scenario.experiment));
  manifest.warnings = scenario.warnings;

  const fs::path dir = resolve_output_dir(scenario, options);
  fs::create_directories(dir);
  Output out(dir, manifest);

  ChainConfig theory_chain = scenario.chain;
  theory_chain.theory = true;

  switch (scenario.experiment) {
    case Experiment::SingleMemristor:
    case Experiment::Cascade:
      trace_experiment(out, scenario, scenario.chain, "");
      if (options.theory) trace_experiment(out, scenario, theory_chain, "_theory");
      break;
    case Experiment::WindowSweep:
      sweep_experiment(out, scenario, scenario.chain, "");
      if (options.theory) sweep_experiment(out, scenario, theory_chain, "_theory");
      break;
    case Experiment::InputWaveformGallery:
      gallery_experiment(out, scenario, scenario.chain, "");
      if (options.theory) gallery_experiment(out, scenario, theory_chain, "_theory");
      break;
    case Experiment::VisibilityStudy:
      visibility_experiment(out, scenario);
      break;
    case Experiment::PurityFitStudy:
      purity_experiment(out, scenario, options.theory);
      break;
    case Experiment::OracleCrossCheck:
      oracle_experiment(out, scenario);
      break;
    case Experiment::SeriesParallelCheck:
      equivalence_experiment(out, scenario);
      break;
  }

  manifest.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream file(dir / "manifest.txt", std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + (dir / "manifest.txt").string());
  file << format_manifest(manifest);
  return manifest;
}

std::string format_manifest(const RunManifest& m) {
  std::string out;
  out += "tool_version=" + m.tool_version + "\n";
  out += "scenario_hash=" + m.scenario_hash + "\n";
  out += "seed=" + std::to_string(m.seed) + "\n";
  out += "experiment=" + m.experiment + "\n";
  out += "wall_clock_s=" + format_number(m.wall_clock_s) + "\n";
  for (const auto& [key, value] : m.results) out += "result." + key + "=" + format_number(value) + "\n";
  for (const auto& w : m.warnings) out += "warning=" + w + "\n";
  for (const auto& f : m.files) out += "file=" + f.name + " rows=" + std::to_string(f.rows) + "\n";
  return out;
}

}  // namespace qmem

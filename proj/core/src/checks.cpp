#include "qmem/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "qmem/error.hpp"
#include "qmem/fock.hpp"
#include "qmem/homodyne.hpp"
#include "qmem/network.hpp"
#include "qmem/runner.hpp"
#include "qmem/scenario.hpp"

namespace qmem::checks {

namespace fs = std::filesystem;

namespace {

constexpr double kPeriod = 400.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CriterionResult result(int id, std::string name, bool pass, double measured, double threshold,
                       std::string detail = {}) {
  return {id, std::move(name), pass, measured, threshold, std::move(detail)};
}

std::string fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, value);
  return buffer;
}

ChainConfig single(double window, double exposure) {
  ChainConfig c;
  c.nodes.push_back({window, exposure, 0.0, InitPolicy::NeutralHalf});
  return c;
}

const std::vector<double> kBetaGrid{0.1, 0.3, 0.5, 0.7, 0.9};
const std::vector<double> kReflGrid{0.0, 0.3, 0.7};
const std::vector<double> kPhaseGrid{0.0, std::numbers::pi / 2.0, std::numbers::pi};

SourceModel pure(double beta_sq) { return {beta_sq, 1.0, 1.0}; }

// Loop of visibility against the input population over the final drive
// period of a chain run.
HysteresisLoop visibility_loop(std::size_t nodes, double efficiency) {
  ChainConfig c;
  for (std::size_t i = 0; i < nodes; ++i) c.nodes.push_back({0.3 * kPeriod, 4.0, 0.0, InitPolicy::NeutralHalf});
  const double dt = 4.0;
  const auto drive = SignalSpec::sin_squared(kPeriod);
  const Trace trace = run_chain(c, drive, steady_state_grid(c, kPeriod, dt));
  const auto period_steps = static_cast<std::size_t>(std::llround(kPeriod / dt));
  const std::size_t first = trace.steps() - period_steps - 1;
  const auto nu = homodyne::visibility_along_trace(trace, SourceModel{0.5, 1.0, 1.0}, efficiency, 0, first);
  return make_loop(std::span(trace.n_in).subspan(first), nu);
}

}  // namespace

CriterionResult quadratic_regime() {
  const auto start = Clock::now();
  const double window = 0.01 * kPeriod;
  const double dt = window / 10.0;
  const auto config = single(window, dt);
  const Trace trace = run_chain(config, SignalSpec::sin_squared(kPeriod), steady_state_grid(config, kPeriod, dt));
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    if (trace.t[k] < window + kPeriod) continue;
    const double n = trace.n_in[k];
    worst = std::max(worst, std::abs(trace.transmitted[0][k] - (n - n * n)));
  }
  const double elapsed = seconds_since(start);
  return result(1, "quadratic regime n_out = n_in - n_in^2", worst <= 0.02 && elapsed < 1.0, worst, 0.02,
                "T=0.01*T_osc, tau=dt=T/10, runtime " + fmt("%.3g", elapsed) + " s");
}

CriterionResult linear_regime() {
  const auto start = Clock::now();
  const double dt = 4.0;
  const auto config = single(kPeriod, dt);
  const Trace trace = run_chain(config, SignalSpec::sin_squared(kPeriod), steady_state_grid(config, kPeriod, dt));
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    if (trace.t[k] < kPeriod) continue;
    worst = std::max(worst, std::abs(trace.reflectivity[0][k] - 0.5));
    worst = std::max(worst, std::abs(trace.transmitted[0][k] - 0.5 * trace.n_in[k]));
  }
  const double elapsed = seconds_since(start);
  return result(2, "linear regime n_out = 0.5 n_in", worst <= 1e-12 && elapsed < 1.0, worst, 1e-12,
                "T=T_osc, runtime " + fmt("%.3g", elapsed) + " s");
}

CriterionResult flux_conservation() {
  ChainConfig c;
  c.nodes = {{120.0, 4.0, 0.1, InitPolicy::NeutralHalf},
             {60.0, 2.0, 0.0, InitPolicy::GrowingWindow},
             {200.0, 4.0, 0.2, InitPolicy::NeutralHalf}};
  DetectionModel noisy;
  noisy.shot_noise = true;
  noisy.efficiency = 0.3;
  noisy.pulse_rate = 1e4;
  noisy.seed = 11;
  c.detection = {noisy};
  const SamplingGrid grid(0.01, 0.01 * 99'999.5);
  const Trace trace = run_chain(c, SignalSpec::sin_squared(kPeriod), grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < trace.nodes(); ++i) {
    const auto& input = i == 0 ? trace.n_in : trace.transmitted[i - 1];
    for (std::size_t k = 0; k < trace.steps(); ++k)
      worst = std::max(worst, std::abs(trace.transmitted[i][k] + trace.reflected[i][k] - input[k]));
  }
  return result(3, "flux conservation at every node", worst <= 1e-15 && trace.steps() >= 100'000, worst,
                1e-15, std::to_string(trace.steps()) + " steps, 3 nodes, shot noise on");
}

CriterionResult moving_average_identity() {
  const double window = 0.3 * kPeriod;
  const double tau = 4.0;
  const double dt = tau / 100.0;
  const auto config = single(window, tau);
  const Trace trace = run_chain(config, SignalSpec::sin_squared(kPeriod), steady_state_grid(config, kPeriod, dt));
  const double pi = std::numbers::pi;
  double worst = 0.0;
  std::size_t boundaries = 0;
  for (std::size_t k = 0; k < trace.steps(); k += 100) {
    const double t = trace.t[k];
    if (t < window) continue;
    const double expected =
        0.5 - kPeriod / (2.0 * pi * window) * std::sin(pi * window / kPeriod) * std::cos(pi * (2.0 * t - window) / kPeriod);
    worst = std::max(worst, std::abs(trace.reflectivity[0][k] - expected));
    ++boundaries;
  }
  return result(4, "moving-average identity at exposure boundaries", worst <= 1e-6, worst, 1e-6,
                std::to_string(boundaries) + " boundaries, T=0.3*T_osc, dt=tau/100");
}

CriterionResult oracle_click_probability() {
  double worst = 0.0;
  for (double b : kBetaGrid)
    for (double r : kReflGrid)
      for (double phi : kPhaseGrid) {
        const double refl[] = {r};
        const double enumerated = fock::two_pulse_pipeline(pure(b), refl, phi, 1.0).at({fock::kShortArm, 1});
        worst = std::max(worst, std::abs(enumerated - homodyne::click_probability_single(b, r, phi)));
      }
  const double half[] = {0.5};
  const double spot_oracle = fock::two_pulse_pipeline(pure(1.0), half, 0.0, 1.0).at({fock::kShortArm, 1});
  const double spot_closed = homodyne::click_probability_single(1.0, 0.5, 0.0);
  const double spot = std::max(std::abs(spot_oracle - 0.21875), std::abs(spot_closed - 0.21875));
  const double measured = std::max(worst, spot);
  return result(5, "oracle vs closed-form click probability", measured <= 1e-9, measured, 1e-9,
                "45-point grid; spot value " + fmt("%.12g", spot_oracle) + " vs 0.21875");
}

CriterionResult oracle_visibility() {
  double worst = 0.0;
  for (double b : kBetaGrid)
    for (double r1 : kReflGrid) {
      const double one[] = {r1};
      worst = std::max(worst, std::abs(homodyne::visibility_chain(pure(b), one, 1.0) -
                                       homodyne::visibility_single(b, 1.0 - r1)));
      for (double r2 : kReflGrid) {
        const double two[] = {r1, r2};
        worst = std::max(worst, std::abs(homodyne::visibility_chain(pure(b), two, 1.0) -
                                         homodyne::visibility_double(b, 1.0 - r1, 1.0 - r2)));
      }
    }
  // Re-splits of a fixed net transmissivity through the oracle.
  double resplit = 0.0;
  for (double b : kBetaGrid)
    for (double product : {0.21, 0.49, 0.09}) {
      const double reference_refl[] = {1.0 - std::sqrt(product), 1.0 - std::sqrt(product)};
      const double reference = homodyne::visibility_chain(pure(b), reference_refl, 1.0);
      for (double t1 : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        if (t1 < product) continue;
        const double t2 = product / t1;
        const double refl[] = {1.0 - t1, 1.0 - t2};
        const double swapped[] = {1.0 - t2, 1.0 - t1};
        resplit = std::max(resplit, std::abs(homodyne::visibility_chain(pure(b), refl, 1.0) - reference));
        resplit = std::max(resplit, std::abs(homodyne::visibility_chain(pure(b), swapped, 1.0) - reference));
        resplit = std::max(resplit, std::abs(homodyne::visibility_double(b, t1, t2) -
                                             homodyne::visibility_double(b, t2, t1)));
      }
    }
  const bool pass = worst <= 1e-9 && resplit <= 1e-12;
  return result(6, "oracle vs closed-form visibilities", pass, worst, 1e-9,
                "re-split spread " + fmt("%.3g", resplit) + " (limit 1e-12)");
}

CriterionResult loss_limit_law() {
  std::vector<double> x, y;
  const double refl[] = {0.5};
  for (int k = 0; k <= 9; ++k) {
    const double b = 0.1 * k;
    x.push_back(b);
    y.push_back(homodyne::visibility_chain(pure(b), refl, 1e-3));
  }
  const auto line = homodyne::fit_line(x, y);
  const double deviation = std::max(std::abs(line.slope + 1.0), std::abs(line.intercept - 1.0));
  return result(7, "loss-limit law nu = 1 - beta^2", deviation <= 0.01, deviation, 0.01,
                "eta=1e-3, slope " + fmt("%.6f", line.slope) + ", intercept " + fmt("%.6f", line.intercept));
}

CriterionResult purity_pipeline() {
  const double purity = 0.95;
  const double v_hom = 0.915;
  const double sigma = 0.01;
  int good = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    homodyne::VisibilityCurve curve;
    for (int k = 0; k <= 9; ++k) {
      const double b = 0.1 * k;
      const double nu = homodyne::visibility_loss_limit({b, purity, v_hom});
      curve.push_back({b, nu + noise(rng), sigma});
    }
    const double error = std::abs(homodyne::fit_purity(curve, v_hom).purity - purity);
    worst = std::max(worst, error);
    good += error <= 0.01;
  }
  return result(8, "purity fit round trip", good >= 95, good, 95,
                "seeds within 0.01 of P=0.95 out of 100, worst error " + fmt("%.4f", worst));
}

CriterionResult hysteresis_structure() {
  const double dt = 0.4;
  const auto drive = SignalSpec::sin_squared(kPeriod);
  std::map<double, HysteresisLoop> loops;
  double pinch = 0.0;
  for (double fraction : {0.01, 0.3, 1.0}) {
    const auto config = single(fraction * kPeriod, dt);
    const Trace trace = run_chain(config, drive, steady_state_grid(config, kPeriod, dt));
    loops[fraction] = extract_loop(trace, kPeriod, 0);
    const auto report = pinch_check(loops[fraction]);
    pinch = std::max({pinch, std::abs(report.rising_at_min), std::abs(report.falling_at_min)});
  }
  const double mid = loops[0.3].area;
  const double fast = loops[0.01].area;
  const double slow = loops[1.0].area;
  const bool pass = mid > fast && mid > slow && slow <= 1e-6 && pinch <= 1e-12;
  return result(9, "hysteresis area ordering and pinch", pass, slow, 1e-6,
                "areas 0.01:" + fmt("%.4g", fast) + " 0.3:" + fmt("%.4g", mid) + " 1.0:" + fmt("%.3g", slow) +
                    "; output at n_in min " + fmt("%.3g", pinch));
}

CriterionResult series_parallel() {
  double worst = 0.0;
  for (double b : kBetaGrid)
    for (double phi : kPhaseGrid)
      for (double r1 : kReflGrid) {
        const double one[] = {r1};
        worst = std::max(worst, series_parallel_equivalence(one, pure(b), phi).max_abs_diff);
        for (double r2 : kReflGrid) {
          const double two[] = {r1, r2};
          worst = std::max(worst, series_parallel_equivalence(two, pure(b), phi).max_abs_diff);
        }
      }
  return result(10, "series/parallel equivalence", worst <= 1e-12, worst, 1e-12, "N=1,2 over 180 grid points");
}

CriterionResult visibility_hysteresis() {
  const double single_ideal = pinch_check(visibility_loop(1, 1.0)).max_branch_gap;
  const double single_lossy = pinch_check(visibility_loop(1, 1e-3)).max_branch_gap;
  const double double_ideal = pinch_check(visibility_loop(2, 1.0)).max_branch_gap;
  const bool pass = single_ideal > 0.0 && single_lossy < 1e-3 && double_ideal < single_ideal;
  return result(11, "visibility hysteresis width", pass, single_lossy, 1e-3,
                "width eta=1 single " + fmt("%.4g", single_ideal) + ", two memristors " +
                    fmt("%.4g", double_ideal) + ", eta=1e-3 " + fmt("%.3g", single_lossy));
}

CriterionResult determinism() {
  const std::string scenario_text = R"({
    "experiment": "cascade",
    "seed": 7,
    "signal": {"waveform": "sin_squared", "period_s": 400},
    "chain": [{"window_fraction": 0.3, "exposure_s": 4}, {"window_fraction": 0.1, "exposure_s": 4}],
    "detection": {"shot_noise": true, "efficiency": 0.5, "pulse_rate_hz": 1e5},
    "grid": {"dt_s": 2}
  })";
  const Scenario scenario = parse_scenario_text(scenario_text);
  const auto stamp = std::to_string(Clock::now().time_since_epoch().count());
  const fs::path base = fs::temp_directory_path() / ("qmemsim_determinism_" + stamp);
  RunOptions first{base / "a", std::nullopt, true};
  RunOptions second{base / "b", std::nullopt, true};
  const auto m1 = run(scenario, first);
  const auto m2 = run(scenario, second);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  std::size_t compared = 0;
  std::size_t differing = m1.files.size() == m2.files.size() ? 0 : 1;
  for (const auto& f : m1.files) {
    ++compared;
    if (slurp(base / "a" / f.name) != slurp(base / "b" / f.name)) ++differing;
  }
  if (m1.scenario_hash != m2.scenario_hash) ++differing;
  std::error_code ignored;
  fs::remove_all(base, ignored);
  return result(12, "byte-identical repeated runs", differing == 0 && compared > 0,
                static_cast<double>(differing), 0.0, std::to_string(compared) + " files compared");
}

namespace {

const std::map<std::string, std::vector<int>, std::less<>>& suites() {
  static const std::map<std::string, std::vector<int>, std::less<>> table{
      {"asymptotic", {1, 2}},   {"conservation", {3, 4}}, {"oracle", {5}},
      {"visibility", {6, 7, 11}}, {"purity", {8}},       {"hysteresis", {9}},
      {"equivalence", {10}},    {"determinism", {12}},
      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"asymptotic", "conservation", "oracle", "visibility", "purity",
                                              "hysteresis", "equivalence", "determinism", "all"};
  return names;
}

bool is_suite(std::string_view name) { return suites().find(name) != suites().end(); }

CriterionResult run_criterion(int id) {
  static const std::function<CriterionResult()> table[] = {
      quadratic_regime,   linear_regime,    flux_conservation, moving_average_identity,
      oracle_click_probability, oracle_visibility, loss_limit_law, purity_pipeline,
      hysteresis_structure, series_parallel,  visibility_hysteresis, determinism};
  if (id < 1 || id > 12) throw DomainError("criterion id must lie in 1..12");
  try {
    return table[id - 1]();
  } catch (const std::exception& e) {
    return result(id, "criterion " + std::to_string(id), false, 0.0, 0.0, std::string("error: ") + e.what());
  }
}

std::vector<CriterionResult> run_suite(std::string_view suite) {
  const auto it = suites().find(suite);
  if (it == suites().end()) throw DomainError("unknown suite '" + std::string(suite) + "'");
  std::vector<CriterionResult> out;
  for (int id : it->second) out.push_back(run_criterion(id));
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %02d %s: measured=%.6g threshold=%.6g", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.measured, r.threshold);
  std::string out = head;
  if (!r.detail.empty()) out += " (" + r.detail + ")";
  return out;
}

}  // namespace qmem::checks

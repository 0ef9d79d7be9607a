#include "qmem/scenario.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qmem/error.hpp"

namespace qmem {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 8> kExperimentNames{{
    {Experiment::SingleMemristor, "single_memristor"},
    {Experiment::Cascade, "cascade"},
    {Experiment::WindowSweep, "window_sweep"},
    {Experiment::InputWaveformGallery, "input_waveform_gallery"},
    {Experiment::VisibilityStudy, "visibility_study"},
    {Experiment::PurityFitStudy, "purity_fit_study"},
    {Experiment::OracleCrossCheck, "oracle_cross_check"},
    {Experiment::SeriesParallelCheck, "series_parallel_check"},
}};

std::string experiment_names() {
  std::string out;
  for (const auto& [e, name] : kExperimentNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

// Collects every validation problem instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& path, const std::string& message) {
    errors_.push_back(path + ": " + message);
  }

  void reject_unknown(const json& object, const std::string& path,
                      std::initializer_list<std::string_view> known) {
    if (!object.is_object()) return;
    for (const auto& [key, value] : object.items()) {
      bool found = false;
      for (auto k : known) found = found || k == key;
      if (!found) error(join(path, key), "unknown key");
    }
  }

  std::optional<double> number(const json& object, const std::string& path, std::string_view key) {
    if (!object.is_object() || !object.contains(key)) return std::nullopt;
    const json& v = object.at(std::string(key));
    if (!v.is_number()) {
      error(join(path, key), "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  double number(const json& object, const std::string& path, std::string_view key, double fallback) {
    return number(object, path, key).value_or(fallback);
  }

  std::optional<std::string> text(const json& object, const std::string& path, std::string_view key) {
    if (!object.is_object() || !object.contains(key)) return std::nullopt;
    const json& v = object.at(std::string(key));
    if (!v.is_string()) {
      error(join(path, key), "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  bool boolean(const json& object, const std::string& path, std::string_view key, bool fallback) {
    if (!object.is_object() || !object.contains(key)) return fallback;
    const json& v = object.at(std::string(key));
    if (!v.is_boolean()) {
      error(join(path, key), "expected true or false");
      return fallback;
    }
    return v.get<bool>();
  }

  std::optional<std::vector<double>> numbers(const json& object, const std::string& path,
                                             std::string_view key) {
    if (!object.is_object() || !object.contains(key)) return std::nullopt;
    const json& v = object.at(std::string(key));
    if (!v.is_array()) {
      error(join(path, key), "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        error(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  const json* block(const json& object, const std::string& path, std::string_view key) {
    if (!object.contains(key)) return nullptr;
    const json& v = object.at(std::string(key));
    if (!v.is_object()) {
      error(join(path, key), "expected an object");
      return nullptr;
    }
    return &v;
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

 private:
  std::vector<std::string>& errors_;
};

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void parse_signal(Reader& r, const json& root, Scenario& s) {
  const json* block = r.block(root, "", "signal");
  const json empty = json::object();
  const json& sig = block ? *block : empty;
  r.reject_unknown(sig, "signal", {"waveform", "period_s", "phase_offset_s", "level"});

  Waveform waveform = Waveform::SinSquared;
  if (auto name = r.text(sig, "signal", "waveform")) {
    if (auto w = parse_waveform(*name))
      waveform = *w;
    else
      r.error("signal.waveform",
              "unknown waveform '" + *name + "'; allowed: " + std::string(waveform_names()));
  }
  const double period = r.number(sig, "signal", "period_s", 400.0);
  const double phase = r.number(sig, "signal", "phase_offset_s", 0.0);
  const double level = r.number(sig, "signal", "level", 0.5);
  bool ok = true;
  if (!(period > 0.0)) {
    r.error("signal.period_s", "must be positive");
    ok = false;
  }
  if (!in_unit(level)) {
    r.error("signal.level", "must lie in [0,1]");
    ok = false;
  }
  if (ok) s.signal = SignalSpec(waveform, period, phase, level);
}

DetectionModel parse_detection(Reader& r, const json& d, const std::string& path) {
  r.reject_unknown(d, path, {"efficiency", "pulse_rate_hz", "shot_noise", "estimator"});
  DetectionModel model;
  model.efficiency = r.number(d, path, "efficiency", model.efficiency);
  model.pulse_rate = r.number(d, path, "pulse_rate_hz", model.pulse_rate);
  model.shot_noise = r.boolean(d, path, "shot_noise", model.shot_noise);
  if (auto name = r.text(d, path, "estimator")) {
    if (auto e = parse_estimator(*name))
      model.estimator = *e;
    else
      r.error(Reader::join(path, "estimator"),
              "unknown estimator '" + *name + "'; allowed: reflected, combined");
  }
  if (!in_unit(model.efficiency)) r.error(Reader::join(path, "efficiency"), "must lie in [0,1]");
  if (!(model.pulse_rate > 0.0)) r.error(Reader::join(path, "pulse_rate_hz"), "must be positive");
  return model;
}

void parse_chain(Reader& r, const json& root, Scenario& s) {
  const double period = s.signal.period();
  std::vector<json> nodes;
  if (root.contains("chain")) {
    const json& chain = root.at("chain");
    if (!chain.is_array() || chain.empty())
      r.error("chain", "expected a non-empty array of memristor blocks");
    else
      nodes.assign(chain.begin(), chain.end());
  }
  if (nodes.empty()) nodes.push_back(json::object());

  s.chain.nodes.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "chain[" + std::to_string(i) + "]";
    const json& n = nodes[i];
    if (!n.is_object()) {
      r.error(path, "expected an object");
      continue;
    }
    r.reject_unknown(n, path,
                     {"integration_window_s", "window_fraction", "exposure_s", "latency_s",
                      "init_policy"});
    MemristorParams p;
    p.integration_window = r.number(n, path, "integration_window_s", 0.3 * period);
    if (auto fraction = r.number(n, path, "window_fraction")) {
      if (!(*fraction > 0.0))
        r.error(path + ".window_fraction", "must be positive");
      else
        p.integration_window = *fraction * period;
    }
    p.exposure = r.number(n, path, "exposure_s", 4.0);
    p.feedback_latency = r.number(n, path, "latency_s", 0.0);
    if (auto name = r.text(n, path, "init_policy")) {
      if (auto policy = parse_init_policy(*name))
        p.init_policy = *policy;
      else
        r.error(path + ".init_policy",
                "unknown policy '" + *name + "'; allowed: neutral_half, growing_window");
    }
    if (!(p.integration_window > 0.0)) r.error(path + ".integration_window_s", "must be positive");
    if (!(p.exposure > 0.0))
      r.error(path + ".exposure_s", "must be positive");
    else if (p.exposure > p.integration_window * (1.0 + 1e-9))
      r.error(path + ".exposure_s", "exposure must not exceed the integration window");
    if (!(p.feedback_latency >= 0.0)) r.error(path + ".latency_s", "must be non-negative");
    else if (!p.experiment_faithful())
      s.warnings.push_back(path + ".latency_s: latency above 5% of the exposure");
    s.chain.nodes.push_back(p);
  }

  s.chain.detection.assign(1, DetectionModel{});
  if (root.contains("detection")) {
    const json& d = root.at("detection");
    if (d.is_object()) {
      s.chain.detection[0] = parse_detection(r, d, "detection");
    } else if (d.is_array()) {
      if (d.size() != s.chain.nodes.size())
        r.error("detection", "per-node detection list must match the chain length");
      s.chain.detection.clear();
      for (std::size_t i = 0; i < d.size(); ++i)
        s.chain.detection.push_back(parse_detection(r, d[i], "detection[" + std::to_string(i) + "]"));
    } else {
      r.error("detection", "expected an object or an array of objects");
    }
  }
  for (auto& model : s.chain.detection) model.seed = s.seed;
}

void parse_grid(Reader& r, const json& root, Scenario& s) {
  const json* block = r.block(root, "", "grid");
  const json empty = json::object();
  const json& g = block ? *block : empty;
  r.reject_unknown(g, "grid", {"dt_s", "duration_s"});
  double min_exposure = 0.0;
  double max_window = 0.0;
  for (const auto& n : s.chain.nodes) {
    min_exposure = min_exposure == 0.0 ? n.exposure : std::min(min_exposure, n.exposure);
    max_window = std::max(max_window, n.integration_window);
  }
  for (const auto& profile : s.sweep_profiles)
    for (double w : profile) {
      max_window = std::max(max_window, w);
      min_exposure = std::min(min_exposure, w);
    }
  s.dt = r.number(g, "grid", "dt_s", min_exposure > 0.0 ? min_exposure : 1.0);
  // Whole drive periods, so extracted loops start at drive phase zero.
  const double period = s.signal.period();
  s.duration = r.number(g, "grid", "duration_s", (std::ceil(max_window / period - 1e-9) + 2.0) * period);
  if (!(s.dt > 0.0))
    r.error("grid.dt_s", "must be positive");
  else if (min_exposure > 0.0 && s.dt > min_exposure * (1.0 + 1e-9))
    r.error("grid.dt_s", "must not exceed the shortest exposure");
  if (!(s.duration > 0.0))
    r.error("grid.duration_s", "must be positive");
  else if (s.dt > 0.0 && s.duration / s.dt < 2.0)
    r.error("grid.duration_s", "must span at least two time steps");
}

void parse_sweep(Reader& r, const json& root, Scenario& s) {
  const json* block = r.block(root, "", "sweep");
  if (!block) return;
  const json& w = *block;
  r.reject_unknown(w, "sweep",
                   {"window_fractions", "profiles", "chain_lengths", "fraction_step", "top_fraction"});
  const double period = s.signal.period();
  if (auto fractions = r.numbers(w, "sweep", "window_fractions")) {
    for (std::size_t i = 0; i < fractions->size(); ++i) {
      const double f = (*fractions)[i];
      if (!(f > 0.0))
        r.error("sweep.window_fractions[" + std::to_string(i) + "]", "must be positive");
      else
        s.sweep_profiles.push_back({f * period});
    }
  }
  if (w.contains("profiles")) {
    const json& profiles = w.at("profiles");
    if (!profiles.is_array()) {
      r.error("sweep.profiles", "expected an array of arrays of window fractions");
    } else {
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        const std::string path = "sweep.profiles[" + std::to_string(i) + "]";
        if (!profiles[i].is_array() || profiles[i].empty()) {
          r.error(path, "expected a non-empty array of window fractions");
          continue;
        }
        std::vector<double> windows;
        for (const auto& f : profiles[i]) {
          if (!f.is_number() || !(f.get<double>() > 0.0)) {
            r.error(path, "window fractions must be positive numbers");
            windows.clear();
            break;
          }
          windows.push_back(f.get<double>() * period);
        }
        if (!windows.empty()) s.sweep_profiles.push_back(std::move(windows));
      }
    }
  }
  if (auto lengths = r.numbers(w, "sweep", "chain_lengths")) {
    const double step = r.number(w, "sweep", "fraction_step", 0.1);
    const double top = r.number(w, "sweep", "top_fraction", 0.9);
    for (double len : *lengths) {
      const auto n = static_cast<std::size_t>(len);
      if (len < 1.0 || static_cast<double>(n) != len || top - static_cast<double>(n - 1) * step <= 0.0) {
        r.error("sweep.chain_lengths", "lengths must be positive integers with positive fractions");
        break;
      }
      s.sweep_profiles.push_back(increasing_fraction_profile(n, period, step, top));
    }
  }
}

void parse_homodyne(Reader& r, const json& root, Scenario& s) {
  const json* block = r.block(root, "", "homodyne");
  const json empty = json::object();
  const json& h = block ? *block : empty;
  r.reject_unknown(h, "homodyne",
                   {"beta_sq", "purity", "v_hom", "efficiency", "phase_steps", "beta_sq_points",
                    "reflectivities", "noise_sigma"});
  auto& hs = s.homodyne;
  hs.source.beta_sq = r.number(h, "homodyne", "beta_sq", hs.source.beta_sq);
  hs.source.purity = r.number(h, "homodyne", "purity", hs.source.purity);
  hs.source.v_hom = r.number(h, "homodyne", "v_hom", hs.source.v_hom);
  hs.efficiency = r.number(h, "homodyne", "efficiency", hs.efficiency);
  hs.noise_sigma = r.number(h, "homodyne", "noise_sigma", hs.noise_sigma);
  const double steps = r.number(h, "homodyne", "phase_steps", static_cast<double>(hs.phase_steps));
  if (steps < 2.0 || steps != std::floor(steps))
    r.error("homodyne.phase_steps", "must be an integer >= 2");
  else
    hs.phase_steps = static_cast<std::size_t>(steps);
  if (auto points = r.numbers(h, "homodyne", "beta_sq_points")) hs.beta_sq_points = *points;
  if (auto refl = r.numbers(h, "homodyne", "reflectivities")) hs.reflectivities = *refl;

  for (auto [key, value] : {std::pair{"beta_sq", hs.source.beta_sq}, {"purity", hs.source.purity},
                            {"v_hom", hs.source.v_hom}, {"efficiency", hs.efficiency}})
    if (!in_unit(value)) r.error(std::string("homodyne.") + key, "must lie in [0,1]");
  if (!(hs.noise_sigma >= 0.0)) r.error("homodyne.noise_sigma", "must be non-negative");
  for (double b : hs.beta_sq_points)
    if (!in_unit(b)) {
      r.error("homodyne.beta_sq_points", "values must lie in [0,1]");
      break;
    }
  std::set<double> distinct(hs.beta_sq_points.begin(), hs.beta_sq_points.end());
  if (distinct.size() != hs.beta_sq_points.size())
    r.error("homodyne.beta_sq_points", "values must be distinct");
  if (hs.reflectivities.size() > 2)
    r.error("homodyne.reflectivities", "at most two memristors fit the interference model");
  for (double v : hs.reflectivities)
    if (!in_unit(v)) {
      r.error("homodyne.reflectivities", "values must lie in [0,1]");
      break;
    }
}

void parse_oracle(Reader& r, const json& root, Scenario& s) {
  const json* block = r.block(root, "", "oracle");
  if (!block) return;
  r.reject_unknown(*block, "oracle", {"beta_sq", "reflectivities", "phases"});
  if (auto v = r.numbers(*block, "oracle", "beta_sq")) s.oracle.beta_sq = *v;
  if (auto v = r.numbers(*block, "oracle", "reflectivities")) s.oracle.reflectivities = *v;
  if (auto v = r.numbers(*block, "oracle", "phases")) s.oracle.phases = *v;
  for (double b : s.oracle.beta_sq)
    if (!in_unit(b)) r.error("oracle.beta_sq", "values must lie in [0,1]");
  for (double v : s.oracle.reflectivities)
    if (!in_unit(v)) r.error("oracle.reflectivities", "values must lie in [0,1]");
}

Scenario parse_json(const json& root) {
  std::vector<std::string> errors;
  Reader r(errors);
  Scenario s;
  if (!root.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  r.reject_unknown(root, "",
                   {"experiment", "seed", "output_dir", "signal", "chain", "detection", "grid",
                    "homodyne", "sweep", "oracle"});

  if (auto name = r.text(root, "", "experiment")) {
    if (auto e = parse_experiment(*name))
      s.experiment = *e;
    else
      r.error("experiment", "unknown experiment '" + *name + "'; allowed: " + experiment_names());
  } else if (!root.contains("experiment")) {
    r.error("experiment", "missing; allowed: " + experiment_names());
  }
  if (root.contains("seed")) {
    const json& seed = root.at("seed");
    if (seed.is_number_unsigned())
      s.seed = seed.get<std::uint64_t>();
    else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)
      s.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
    else
      r.error("seed", "expected a non-negative integer");
  }
  if (auto dir = r.text(root, "", "output_dir")) s.output_dir = *dir;

  parse_signal(r, root, s);
  parse_chain(r, root, s);
  parse_sweep(r, root, s);
  parse_grid(r, root, s);
  parse_homodyne(r, root, s);
  parse_oracle(r, root, s);

  if (s.experiment == Experiment::SingleMemristor && s.chain.nodes.size() != 1)
    r.error("chain", "single_memristor takes exactly one chain entry");
  if (s.experiment == Experiment::WindowSweep && s.sweep_profiles.empty())
    r.error("sweep", "window_sweep needs window_fractions, profiles or chain_lengths");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return s;
}

json to_json(const Scenario& s) {
  json j;
  j["experiment"] = std::string(to_string(s.experiment));
  j["seed"] = s.seed;
  j["signal"] = {{"waveform", std::string(to_string(s.signal.waveform()))},
                 {"period_s", s.signal.period()},
                 {"phase_offset_s", s.signal.phase_offset()},
                 {"level", s.signal.level()}};
  json chain = json::array();
  for (const auto& n : s.chain.nodes)
    chain.push_back({{"integration_window_s", n.integration_window},
                     {"exposure_s", n.exposure},
                     {"latency_s", n.feedback_latency},
                     {"init_policy", std::string(to_string(n.init_policy))}});
  j["chain"] = chain;
  json detection = json::array();
  for (const auto& d : s.chain.detection)
    detection.push_back({{"efficiency", d.efficiency},
                         {"pulse_rate_hz", d.pulse_rate},
                         {"shot_noise", d.shot_noise},
                         {"estimator", std::string(to_string(d.estimator))}});
  j["detection"] = detection;
  j["theory"] = s.chain.theory;
  j["grid"] = {{"dt_s", s.dt}, {"duration_s", s.duration}};
  j["homodyne"] = {{"beta_sq", s.homodyne.source.beta_sq},
                   {"purity", s.homodyne.source.purity},
                   {"v_hom", s.homodyne.source.v_hom},
                   {"efficiency", s.homodyne.efficiency},
                   {"phase_steps", s.homodyne.phase_steps},
                   {"beta_sq_points", s.homodyne.beta_sq_points},
                   {"reflectivities", s.homodyne.reflectivities},
                   {"noise_sigma", s.homodyne.noise_sigma}};
  j["oracle"] = {{"beta_sq", s.oracle.beta_sq},
                 {"reflectivities", s.oracle.reflectivities},
                 {"phases", s.oracle.phases}};
  j["sweep_profiles"] = s.sweep_profiles;
  return j;
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& [exp, name] : kExperimentNames)
    if (exp == e) return name;
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [exp, n] : kExperimentNames)
    if (n == name) return exp;
  return std::nullopt;
}

Scenario parse_scenario_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<parse>: ") + e.what()});
  }
  return parse_json(root);
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path.string() + ": cannot open scenario file"});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario_text(buffer.str());
  } catch (const ConfigError& e) {
    std::vector<std::string> errors;
    for (const auto& msg : e.errors()) errors.push_back(path.string() + ": " + msg);
    throw ConfigError(std::move(errors));
  }
}

std::string canonical_form(const Scenario& scenario) { return to_json(scenario).dump(); }

std::string scenario_hash(const Scenario& scenario) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_form(scenario)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

}  // namespace qmem

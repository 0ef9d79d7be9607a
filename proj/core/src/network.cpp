#include "qmem/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qmem/error.hpp"
#include "qmem/fock.hpp"

namespace qmem {

void ChainConfig::validate() const {
  if (nodes.empty()) throw DomainError("chain needs at least one memristor");
  if (detection.size() != 1 && detection.size() != nodes.size())
    throw DomainError("chain needs one shared detection model or one per node");
  for (const auto& node : nodes) node.validate();
  for (const auto& model : detection) model.validate();
}

const DetectionModel& ChainConfig::detection_for(std::size_t node) const {
  return detection.size() == 1 ? detection.front() : detection.at(node);
}

double ChainConfig::max_window() const {
  double longest = 0.0;
  for (const auto& node : nodes) longest = std::max(longest, node.integration_window);
  return longest;
}

Trace run_chain(const ChainConfig& config, const SignalSpec& drive, const SamplingGrid& grid) {
  config.validate();

  std::vector<Memristor> chain;
  chain.reserve(config.nodes.size());
  for (std::size_t i = 0; i < config.nodes.size(); ++i) {
    MemristorParams params = config.nodes[i];
    DetectionModel model = config.detection_for(i);
    if (config.theory) {
      params.feedback_latency = 0.0;
      model.shot_noise = false;
    }
    if (grid.dt() > params.exposure * (1.0 + 1e-9))
      throw DomainError("grid dt must not exceed any node's exposure");
    // Distinct, reproducible streams per node from one scenario seed.
    model.seed += 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i);
    chain.emplace_back(params, model);
  }

  const std::size_t n = config.nodes.size();
  const std::size_t steps = grid.size();
  Trace trace;
  trace.dt = grid.dt();
  trace.max_window = config.max_window();
  trace.drive_period = drive.period();
  trace.steady_state_reached = grid.duration() >= trace.max_window + drive.period();
  trace.t.resize(steps);
  trace.n_in.resize(steps);
  trace.reflectivity.assign(n, std::vector<double>(steps));
  trace.reflected.assign(n, std::vector<double>(steps));
  trace.transmitted.assign(n, std::vector<double>(steps));

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = grid.time(k);
    double input = drive.sample(t);
    trace.t[k] = t;
    trace.n_in[k] = input;
    for (std::size_t i = 0; i < n; ++i) {
      const StepResult r = chain[i].step(input, grid.dt());
      trace.reflectivity[i][k] = r.reflectivity;
      trace.reflected[i][k] = r.reflected;
      trace.transmitted[i][k] = r.transmitted;
      input = r.transmitted;
    }
  }
  return trace;
}

double shoelace_area(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    twice += x[i] * y[j] - x[j] * y[i];
  }
  return 0.5 * twice;
}

namespace {

struct Point {
  double x;
  double y;
};

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double length(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Proper crossing of segments ab and cd (interiors intersect at one point).
// Near-collinear configurations are treated as non-crossing.
bool crossing(const Point& a, const Point& b, const Point& c, const Point& d, Point& at) {
  if (std::max(a.x, b.x) < std::min(c.x, d.x) || std::max(c.x, d.x) < std::min(a.x, b.x) ||
      std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y))
    return false;
  const double eps = 1e-12 * length(a, b) * length(c, d);
  if (eps == 0.0) return false;
  const double d1 = cross(a, b, c);
  const double d2 = cross(a, b, d);
  const double d3 = cross(c, d, a);
  const double d4 = cross(c, d, b);
  if (std::abs(d1) <= eps || std::abs(d2) <= eps || std::abs(d3) <= eps || std::abs(d4) <= eps)
    return false;
  if ((d1 > 0) == (d2 > 0) || (d3 > 0) == (d4 > 0)) return false;
  const double s = d3 / (d3 - d4);
  at = {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
  return true;
}

double polygon_area(const std::vector<Point>& p) {
  double twice = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    twice += u.x * v.y - v.x * u.y;
  }
  return 0.5 * twice;
}

}  // namespace

double lobe_area(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 3) return 0.0;
  std::vector<std::vector<Point>> pending(1);
  pending.front().reserve(n);
  for (std::size_t i = 0; i < n; ++i) pending.front().push_back({x[i], y[i]});

  double total = 0.0;
  while (!pending.empty()) {
    std::vector<Point> poly = std::move(pending.back());
    pending.pop_back();
    const std::size_t m = poly.size();
    if (m < 3) continue;

    bool split = false;
    for (std::size_t i = 0; i < m && !split; ++i) {
      for (std::size_t j = i + 2; j < m && !split; ++j) {
        if (i == 0 && j == m - 1) continue;  // adjacent through the closing edge
        Point at{};
        if (!crossing(poly[i], poly[i + 1], poly[j], poly[(j + 1) % m], at)) continue;
        // Cut at the crossing into the lobe i+1..j and the remainder.
        std::vector<Point> lobe{at};
        lobe.insert(lobe.end(), poly.begin() + static_cast<std::ptrdiff_t>(i + 1),
                    poly.begin() + static_cast<std::ptrdiff_t>(j + 1));
        std::vector<Point> rest{at};
        rest.insert(rest.end(), poly.begin() + static_cast<std::ptrdiff_t>(j + 1), poly.end());
        rest.insert(rest.end(), poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(i + 1));
        pending.push_back(std::move(lobe));
        pending.push_back(std::move(rest));
        split = true;
      }
    }
    if (!split) total += std::abs(polygon_area(poly));
  }
  return total;
}

HysteresisLoop make_loop(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("loop coordinates differ in length");
  HysteresisLoop loop;
  loop.x.assign(x.begin(), x.end());
  loop.y.assign(y.begin(), y.end());
  loop.signed_area = shoelace_area(x, y);
  loop.area = lobe_area(x, y);
  return loop;
}

SamplingGrid steady_state_grid(const ChainConfig& config, double drive_period, double dt) {
  return SamplingGrid(dt, config.max_window() + 2.0 * drive_period);
}

HysteresisLoop extract_loop(const Trace& trace, double drive_period, std::size_t node) {
  if (node >= trace.nodes()) throw DomainError("loop node index out of range");
  if (!(drive_period > 0.0)) throw DomainError("drive period must be positive");
  const double required = trace.max_window + 2.0 * drive_period;
  const double available = trace.steps() < 2 ? 0.0 : trace.t.back() - trace.t.front();
  if (available < required * (1.0 - 1e-9)) {
    char message[160];
    std::snprintf(message, sizeof message,
                  "trace spans %.6g s; loop extraction needs at least %.6g s "
                  "(longest window + two drive periods)",
                  available, required);
    throw InsufficientDataError(message, required);
  }
  const auto per_period = static_cast<std::size_t>(std::llround(drive_period / trace.dt));
  if (per_period < 2 || per_period + 1 > trace.steps())
    throw InsufficientDataError("drive period is not resolved by the trace time step", required);
  const std::size_t first = trace.steps() - 1 - per_period;
  std::span<const double> x(trace.n_in);
  std::span<const double> y(trace.transmitted[node]);
  return make_loop(x.subspan(first), y.subspan(first));
}

namespace {

// Branch value at x by linear interpolation over the first (or last)
// segment whose abscissa range contains x.
double branch_value(const std::vector<Point>& branch, double x, bool from_back) {
  if (branch.size() == 1) return branch.front().y;
  const std::size_t segments = branch.size() - 1;
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t i = from_back ? segments - 1 - s : s;
    const Point& a = branch[i];
    const Point& b = branch[i + 1];
    const double lo = std::min(a.x, b.x);
    const double hi = std::max(a.x, b.x);
    if (x < lo || x > hi) continue;
    if (hi == lo) return from_back ? b.y : a.y;
    return a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y);
  }
  // Outside the branch range: nearest endpoint.
  const Point& a = branch.front();
  const Point& b = branch.back();
  return std::abs(a.x - x) <= std::abs(b.x - x) ? a.y : b.y;
}

}  // namespace

PinchReport pinch_check(const HysteresisLoop& loop) {
  PinchReport report;
  const std::size_t n = loop.x.size();
  if (n == 0) return report;

  // Lowest index wins ties so loops that start at the input minimum keep
  // their natural orientation.
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (loop.x[i] < loop.x[lo] - 1e-15) lo = i;
    if (loop.x[i] > loop.x[hi] + 1e-15) hi = i;
  }
  report.min_input = loop.x[lo];
  report.max_input = loop.x[hi];

  std::vector<Point> rising;
  for (std::size_t i = lo;; i = (i + 1) % n) {
    rising.push_back({loop.x[i], loop.y[i]});
    if (i == hi) break;
  }
  // Falling branch runs from the maximum back to the minimum. When the loop
  // repeats the starting phase as its last sample, that sample closes the
  // branch; otherwise the branch closes on the shared minimum vertex.
  std::vector<Point> falling;
  const std::size_t before_lo = (lo + n - 1) % n;
  const bool repeated_start = std::abs(loop.x[before_lo] - loop.x[lo]) <= 1e-12 && before_lo != hi;
  for (std::size_t i = hi;; i = (i + 1) % n) {
    falling.push_back({loop.x[i], loop.y[i]});
    if (repeated_start ? i == before_lo : i == lo) break;
  }

  report.rising_at_min = rising.front().y;
  report.falling_at_min = falling.back().y;
  report.gap_at_max = std::abs(branch_value(rising, report.max_input, true) -
                               branch_value(falling, report.max_input, false));
  constexpr int kSamples = 257;
  for (int s = 0; s < kSamples; ++s) {
    const double x = report.min_input + (report.max_input - report.min_input) * s / (kSamples - 1);
    const double gap = std::abs(branch_value(rising, x, false) - branch_value(falling, x, true));
    report.max_branch_gap = std::max(report.max_branch_gap, gap);
  }
  report.pinched_at_origin = std::abs(report.min_input) <= 1e-12 &&
                             std::abs(report.rising_at_min) <= 1e-12 &&
                             std::abs(report.falling_at_min) <= 1e-12;
  return report;
}

std::vector<double> increasing_fraction_profile(std::size_t n, double drive_period, double step,
                                                double top_fraction) {
  if (n == 0) throw DomainError("profile needs at least one node");
  std::vector<double> windows;
  for (std::size_t k = 1; k <= n; ++k) {
    const double fraction = top_fraction - static_cast<double>(n - k) * step;
    if (!(fraction > 0.0)) throw DomainError("profile fraction must stay positive");
    windows.push_back(fraction * drive_period);
  }
  return windows;
}

std::vector<SweepRow> sweep_windows(const ChainConfig& base,
                                    const std::vector<std::vector<double>>& profiles,
                                    const SignalSpec& drive, const SamplingGrid& grid) {
  base.validate();
  std::vector<SweepRow> rows;
  for (const auto& profile : profiles) {
    if (profile.empty()) throw DomainError("window profile is empty");
    ChainConfig config = base;
    if (profile.size() != 1 && profile.size() != config.nodes.size()) {
      if (config.nodes.size() != 1)
        throw DomainError("window profile length does not match the chain");
      config.nodes.assign(profile.size(), config.nodes.front());
      if (config.detection.size() != 1) config.detection.resize(1);
    }
    for (std::size_t i = 0; i < config.nodes.size(); ++i) {
      auto& node = config.nodes[i];
      node.integration_window = profile.size() == 1 ? profile.front() : profile[i];
      node.exposure = std::min(node.exposure, node.integration_window);
    }

    SweepRow row;
    char id[32];
    for (std::size_t i = 0; i < config.nodes.size(); ++i) {
      std::snprintf(id, sizeof id, "%s%g", i == 0 ? "T" : "+", config.nodes[i].integration_window);
      row.config_id += id;
      row.windows.push_back(config.nodes[i].integration_window);
    }
    const Trace trace = run_chain(config, drive, grid);
    row.loop = extract_loop(trace, drive.period(), config.nodes.size() - 1);
    row.area = row.loop.area;
    rows.push_back(std::move(row));
  }
  return rows;
}

EquivalenceReport series_parallel_equivalence(std::span<const double> reflectivities,
                                              const SourceModel& source, double phase,
                                              double efficiency) {
  using namespace fock;
  const std::size_t n = reflectivities.size();
  if (n < 1 || n > 2)
    throw DomainError("series/parallel equivalence is defined for chains of 1 or 2 memristors");

  // Time-bin layout: both emissions share one rail and one chain, then the
  // unbalanced interferometer; outcomes are read in the overlap bin.
  const auto series_elements = pipeline_elements(reflectivities);
  const MixedState series_out =
      fock::apply(prepare_two_pulse_source(source, phase, kShortArm), series_elements);
  const std::vector<Detector> series_detectors{{kShortArm, 1}, {kLongArm, 1}};

  // Parallel layout: emission 1 on rail a, emission 0 on rail b, same bin,
  // one chain copy per rail, routing probability 1/2 per rail, then one
  // balanced beam splitter.
  const int rail_a = kShortArm;
  const int rail_b = kLongArm;
  const MixedState rails = remap(prepare_two_pulse_source(source, phase, kShortArm),
                                 [&](const Mode& m) {
                                   Mode moved = m;
                                   moved.spatial = m.time_bin == 0 ? rail_b : rail_a;
                                   moved.time_bin = 0;
                                   return moved;
                                 });
  std::vector<Element> parallel_elements;
  const int copies = static_cast<int>(n);
  for (int i = 0; i < copies; ++i) {
    parallel_elements.emplace_back(MemristorTap{rail_a, kFirstFeedback + i, reflectivities[i]});
    parallel_elements.emplace_back(
        MemristorTap{rail_b, kFirstFeedback + copies + i, reflectivities[i]});
  }
  const int routing_loss = kFirstFeedback + 2 * copies;
  parallel_elements.emplace_back(BeamSplitter{rail_a, routing_loss, 0.5});
  parallel_elements.emplace_back(BeamSplitter{rail_b, routing_loss + 1, 0.5});
  parallel_elements.emplace_back(BeamSplitter{rail_a, rail_b, 0.5});
  const MixedState parallel_out = fock::apply(rails, parallel_elements);
  const std::vector<Detector> parallel_detectors{{rail_a, 0}, {rail_b, 0}};

  EquivalenceReport report;
  report.series = joint_click_distribution(series_out, series_detectors, efficiency);
  report.parallel = joint_click_distribution(parallel_out, parallel_detectors, efficiency);
  for (std::size_t k = 0; k < report.series.size(); ++k)
    report.max_abs_diff = std::max(report.max_abs_diff, std::abs(report.series[k] - report.parallel[k]));
  return report;
}

}  // namespace qmem

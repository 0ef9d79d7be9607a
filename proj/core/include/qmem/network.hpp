#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qmem/memristor.hpp"
#include "qmem/signal.hpp"
#include "qmem/source.hpp"

namespace qmem {

/// Series chain of memristors. Node i+1 is driven by node i's transmitted
/// population; every node feeds back only on its own reflected arm.
struct ChainConfig {
  std::vector<MemristorParams> nodes;
  /// Either one model shared by all nodes or one per node.
  std::vector<DetectionModel> detection{DetectionModel{}};
  /// Noise-free, zero-latency companion run ("theory curves").
  bool theory = false;

  void validate() const;
  const DetectionModel& detection_for(std::size_t node) const;
  double max_window() const;
};

/// Column-oriented record of a chain simulation. Node vectors are indexed
/// [node][step].
struct Trace {
  std::vector<double> t;
  std::vector<double> n_in;
  std::vector<std::vector<double>> reflectivity;
  std::vector<std::vector<double>> reflected;
  std::vector<std::vector<double>> transmitted;
  double dt = 0.0;
  double max_window = 0.0;
  double drive_period = 0.0;
  /// False when the run is shorter than max window + one drive period.
  bool steady_state_reached = false;

  std::size_t nodes() const noexcept { return reflectivity.size(); }
  std::size_t steps() const noexcept { return t.size(); }
  std::span<const double> output() const { return transmitted.back(); }
};

Trace run_chain(const ChainConfig& config, const SignalSpec& drive, const SamplingGrid& grid);

/// Ordered (x, y) samples over one period with the first and last sample at
/// the same drive phase.
struct HysteresisLoop {
  std::vector<double> x;
  std::vector<double> y;
  double signed_area = 0.0;  ///< shoelace over the closed polyline
  double area = 0.0;         ///< sum of absolute lobe areas
};

/// Builds a loop from parallel series, computing both area metrics.
HysteresisLoop make_loop(std::span<const double> x, std::span<const double> y);

/// Loop over the final full drive period: x = chain input, y = transmitted
/// population of `node`. Throws InsufficientDataError unless the trace covers
/// max window + two drive periods.
HysteresisLoop extract_loop(const Trace& trace, double drive_period, std::size_t node);

/// Signed shoelace area of the closed polygon through the points.
double shoelace_area(std::span<const double> x, std::span<const double> y);

/// Sum of |area| over the lobes of a possibly self-intersecting closed
/// polygon. Figure-eight loops do not cancel.
double lobe_area(std::span<const double> x, std::span<const double> y);

struct PinchReport {
  double rising_at_min = 0.0;   ///< rising branch at the smallest input
  double falling_at_min = 0.0;  ///< falling branch at the smallest input
  double min_input = 0.0;
  double max_input = 0.0;
  double gap_at_max = 0.0;      ///< |rising - falling| at the largest input
  double max_branch_gap = 0.0;  ///< largest vertical opening between branches
  bool pinched_at_origin = false;
};

/// Splits the loop at its extreme inputs into rising and falling branches
/// and compares them.
PinchReport pinch_check(const HysteresisLoop& loop);

struct SweepRow {
  std::string config_id;
  std::vector<double> windows;
  double area = 0.0;
  HysteresisLoop loop;
};

/// One simulation per window profile. A profile of length 1 is broadcast to
/// every node of `base`; otherwise it must match the node count (and the
/// chain is resized to it when `base` has a single node).
std::vector<SweepRow> sweep_windows(const ChainConfig& base,
                                    const std::vector<std::vector<double>>& profiles,
                                    const SignalSpec& drive, const SamplingGrid& grid);

/// Windows for an n-node chain whose last node sits at `top_fraction` of the
/// drive period and each earlier node `step` lower: n=2 -> {0.8, 0.9} T_osc,
/// n=9 -> {0.1 ... 0.9} T_osc for step 0.1, top 0.9.
std::vector<double> increasing_fraction_profile(std::size_t n, double drive_period,
                                                double step = 0.1, double top_fraction = 0.9);

/// Grid long enough for loop extraction: max window + two drive periods.
SamplingGrid steady_state_grid(const ChainConfig& config, double drive_period, double dt);

struct EquivalenceReport {
  /// Joint click probabilities at the two interferometer outputs, indexed by
  /// bitmask (bit 0: first output clicked, bit 1: second output clicked).
  std::vector<double> series;
  std::vector<double> parallel;
  double max_abs_diff = 0.0;
};

/// Compares two consecutive pulses through one chain followed by a
/// delay-unbalanced interferometer (statistics at the overlap time bin)
/// against two parallel chain copies meeting on a balanced beam splitter,
/// each rail carrying the 1/2 routing probability of the first splitter.
/// Supports 1 or 2 nodes with fixed reflectivities.
EquivalenceReport series_parallel_equivalence(std::span<const double> reflectivities,
                                              const SourceModel& source, double phase,
                                              double efficiency = 1.0);

}  // namespace qmem

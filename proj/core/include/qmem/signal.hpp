#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace qmem {

enum class Waveform { SinSquared, AbsSin, Triangle, Sawtooth, RaisedCosine, Constant };

std::string_view to_string(Waveform w);
std::optional<Waveform> parse_waveform(std::string_view name);
/// Comma separated list of accepted waveform names, for error messages.
std::string_view waveform_names();

/// Periodic one-photon-population drive <n_in(t)>, always in [0,1].
///
/// With u = ((t - phase_offset) mod period) / period:
///   SinSquared    sin^2(pi u)
///   AbsSin        |sin(pi u)|
///   Triangle      2u on [0,1/2), 2(1-u) on [1/2,1)
///   Sawtooth      u
///   RaisedCosine  Hann pulse (1 - cos(4 pi u))/2 on [0,1/2), 0 after
///   Constant      level
class SignalSpec {
 public:
  /// Throws DomainError when period <= 0 or level is outside [0,1].
  SignalSpec(Waveform waveform, double period, double phase_offset = 0.0, double level = 0.0);

  static SignalSpec sin_squared(double period, double phase_offset = 0.0) {
    return {Waveform::SinSquared, period, phase_offset};
  }
  static SignalSpec constant(double level, double period = 1.0) {
    return {Waveform::Constant, period, 0.0, level};
  }

  double sample(double t) const;

  Waveform waveform() const noexcept { return waveform_; }
  double period() const noexcept { return period_; }
  double phase_offset() const noexcept { return phase_offset_; }
  double level() const noexcept { return level_; }

 private:
  Waveform waveform_;
  double period_;
  double phase_offset_;
  double level_;
};

/// Uniform time grid t_k = origin + k dt, k = 0 .. floor(duration/dt).
class SamplingGrid {
 public:
  /// Throws DomainError unless dt > 0, duration > 0 and duration/dt >= 2.
  SamplingGrid(double dt, double duration, double origin = 0.0);

  double dt() const noexcept { return dt_; }
  double duration() const noexcept { return duration_; }
  double origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return size_; }
  double time(std::size_t k) const noexcept { return origin_ + static_cast<double>(k) * dt_; }

 private:
  double dt_;
  double duration_;
  double origin_;
  std::size_t size_;
};

/// Excited-state population after a resonant pulse of the given area,
/// sin^2(area/2) for an ideal two-level emitter. Area must lie in [0, pi].
double pulse_area_to_population(double area);

std::vector<std::pair<double, double>> discretize(const SignalSpec& spec, const SamplingGrid& grid);

}  // namespace qmem

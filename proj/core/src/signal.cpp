#include "qmem/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qmem/error.hpp"

namespace qmem {

namespace {

constexpr std::array<std::pair<Waveform, std::string_view>, 6> kWaveformNames{{
    {Waveform::SinSquared, "sin_squared"},
    {Waveform::AbsSin, "abs_sin"},
    {Waveform::Triangle, "triangle"},
    {Waveform::Sawtooth, "sawtooth"},
    {Waveform::RaisedCosine, "raised_cosine"},
    {Waveform::Constant, "constant"},
}};

}  // namespace

std::string_view to_string(Waveform w) {
  for (const auto& [wave, name] : kWaveformNames)
    if (wave == w) return name;
  return "unknown";
}

std::optional<Waveform> parse_waveform(std::string_view name) {
  for (const auto& [wave, n] : kWaveformNames)
    if (n == name) return wave;
  return std::nullopt;
}

std::string_view waveform_names() {
  return "sin_squared, abs_sin, triangle, sawtooth, raised_cosine, constant";
}

SignalSpec::SignalSpec(Waveform waveform, double period, double phase_offset, double level)
    : waveform_(waveform), period_(period), phase_offset_(phase_offset), level_(level) {
  if (!(period > 0.0) || !std::isfinite(period))
    throw DomainError("signal period must be positive");
  if (!std::isfinite(phase_offset)) throw DomainError("signal phase offset must be finite");
  if (waveform == Waveform::Constant && !(level >= 0.0 && level <= 1.0))
    throw DomainError("constant signal level must lie in [0,1]");
}

double SignalSpec::sample(double t) const {
  if (waveform_ == Waveform::Constant) return level_;

  // fmod is exact, so sample(t) == sample(t + period) whenever t + period is
  // itself representable.
  double shifted = std::fmod(t - phase_offset_, period_);
  if (shifted < 0.0) shifted += period_;
  const double u = shifted / period_;
  constexpr double pi = std::numbers::pi;

  double value = 0.0;
  switch (waveform_) {
    case Waveform::SinSquared: {
      const double s = std::sin(pi * u);
      value = s * s;
      break;
    }
    case Waveform::AbsSin:
      value = std::abs(std::sin(pi * u));
      break;
    case Waveform::Triangle:
      value = u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
      break;
    case Waveform::Sawtooth:
      value = u;
      break;
    case Waveform::RaisedCosine:
      value = u < 0.5 ? 0.5 * (1.0 - std::cos(4.0 * pi * u)) : 0.0;
      break;
    case Waveform::Constant:
      break;
  }
  return std::clamp(value, 0.0, 1.0);
}

SamplingGrid::SamplingGrid(double dt, double duration, double origin)
    : dt_(dt), duration_(duration), origin_(origin), size_(0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("grid dt must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw DomainError("grid duration must be positive");
  const double steps = std::floor(duration / dt + 1e-9);
  if (steps < 2.0) throw DomainError("grid must hold at least two intervals (duration/dt >= 2)");
  size_ = static_cast<std::size_t>(steps) + 1;
}

double pulse_area_to_population(double area) {
  if (!(area >= 0.0 && area <= std::numbers::pi))
    throw DomainError("pulse area must lie in [0, pi]");
  const double s = std::sin(0.5 * area);
  return s * s;
}

std::vector<std::pair<double, double>> discretize(const SignalSpec& spec, const SamplingGrid& grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    out.emplace_back(t, spec.sample(t));
  }
  return out;
}

}  // namespace qmem

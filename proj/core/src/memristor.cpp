#include "qmem/memristor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qmem/error.hpp"

namespace qmem {

namespace {

// Relative slack when comparing accumulated times against exposure and
// latency boundaries.
constexpr double kTimeSlack = 1e-9;

}  // namespace

std::string_view to_string(InitPolicy p) {
  return p == InitPolicy::NeutralHalf ? "neutral_half" : "growing_window";
}

std::optional<InitPolicy> parse_init_policy(std::string_view name) {
  if (name == "neutral_half") return InitPolicy::NeutralHalf;
  if (name == "growing_window") return InitPolicy::GrowingWindow;
  return std::nullopt;
}

std::string_view to_string(Estimator e) {
  return e == Estimator::Reflected ? "reflected" : "combined";
}

std::optional<Estimator> parse_estimator(std::string_view name) {
  if (name == "reflected") return Estimator::Reflected;
  if (name == "combined") return Estimator::Combined;
  return std::nullopt;
}

void MemristorParams::validate() const {
  if (!(integration_window > 0.0) || !std::isfinite(integration_window))
    throw DomainError("integration window must be positive");
  if (!(exposure > 0.0) || !std::isfinite(exposure))
    throw DomainError("exposure must be positive");
  if (exposure > integration_window * (1.0 + kTimeSlack))
    throw DomainError("exposure must not exceed the integration window");
  if (!(feedback_latency >= 0.0) || !std::isfinite(feedback_latency))
    throw DomainError("feedback latency must be non-negative");
}

std::size_t MemristorParams::window_length() const {
  const double ratio = std::round(integration_window / exposure);
  return std::max<std::size_t>(1, static_cast<std::size_t>(ratio));
}

void DetectionModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw DomainError("detection efficiency must lie in [0,1]");
  if (!(pulse_rate > 0.0) || !std::isfinite(pulse_rate))
    throw DomainError("pulse rate must be positive");
}

double reflectivity_from_window(std::span<const double> history) {
  if (history.empty()) return 0.5;
  const double sum = std::accumulate(history.begin(), history.end(), 0.0);
  return std::clamp(sum / static_cast<double>(history.size()), 0.0, 1.0);
}

double estimate_input(std::uint64_t counts_reflected, const DetectionModel& model,
                      double reflectivity, double exposure, double previous) {
  if (reflectivity < kReflectivityFloor || model.efficiency <= 0.0) return previous;
  const double expected_per_unit = model.pulse_rate * exposure * model.efficiency * reflectivity;
  return std::clamp(static_cast<double>(counts_reflected) / expected_per_unit, 0.0, 1.0);
}

std::uint64_t sample_counts(double n_in, double reflectivity, const DetectionModel& model,
                            double exposure, std::mt19937_64& rng) {
  const double trials = std::round(model.pulse_rate * exposure);
  const double p = std::clamp(model.efficiency * reflectivity * n_in, 0.0, 1.0);
  if (!model.shot_noise) return static_cast<std::uint64_t>(std::llround(trials * p));
  if (p <= 0.0 || trials <= 0.0) return 0;
  std::binomial_distribution<std::uint64_t> law(static_cast<std::uint64_t>(trials), p);
  return law(rng);
}

Memristor::Memristor(const MemristorParams& params, const DetectionModel& model)
    : params_(params), model_(model), rng_(model.seed), window_length_(0) {
  params_.validate();
  model_.validate();
  window_length_ = params_.window_length();
  if (params_.init_policy == InitPolicy::NeutralHalf) history_.assign(window_length_, 0.5);
  reflectivity_ = reflectivity_from_window(std::vector<double>(history_.begin(), history_.end()));
  previous_reflectivity_ = reflectivity_;
}

StepResult Memristor::step(double n_in, double dt) {
  if (!(n_in >= 0.0 && n_in <= 1.0)) throw DomainError("input population must lie in [0,1]");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (dt > params_.exposure * (1.0 + kTimeSlack))
    throw DomainError("time step must not exceed the exposure");

  // Close the interval that ended at the current clock, now that its right
  // endpoint sample is known.
  if (has_previous_) {
    const double mean_in = 0.5 * (previous_input_ + n_in);
    input_integral_ += mean_in * previous_dt_;
    reflected_integral_ += previous_reflectivity_ * mean_in * previous_dt_;
    reflectivity_integral_ += previous_reflectivity_ * previous_dt_;
    exposure_elapsed_ += previous_dt_;
    if (exposure_elapsed_ >= params_.exposure * (1.0 - kTimeSlack)) close_exposure();
  }
  apply_due_updates();

  StepResult out;
  out.reflectivity = reflectivity_;
  out.reflected = reflectivity_ * n_in;
  out.transmitted = n_in - out.reflected;

  has_previous_ = true;
  previous_input_ = n_in;
  previous_dt_ = dt;
  previous_reflectivity_ = reflectivity_;
  clock_ += dt;
  return out;
}

void Memristor::close_exposure() {
  const double span = exposure_elapsed_;
  const double mean_in = input_integral_ / span;

  double estimate = 0.0;
  if (!model_.shot_noise) {
    estimate = std::clamp(mean_in, 0.0, 1.0);
  } else {
    const double mean_reflectivity = reflectivity_integral_ / span;
    const double mean_reflected = reflected_integral_ / span;
    // sample_counts takes R and n_in separately; pass the arm population
    // with unit reflectivity so a time-varying R inside the exposure is
    // weighted correctly.
    const std::uint64_t counts_reflected = sample_counts(mean_reflected, 1.0, model_, span, rng_);
    if (model_.estimator == Estimator::Reflected) {
      estimate = estimate_input(counts_reflected, model_, mean_reflectivity, span, last_estimate_);
    } else {
      const double mean_transmitted = std::max(0.0, mean_in - mean_reflected);
      const std::uint64_t counts_transmitted =
          sample_counts(mean_transmitted, 1.0, model_, span, rng_);
      if (model_.efficiency <= 0.0) {
        estimate = last_estimate_;
      } else {
        const double total = static_cast<double>(counts_reflected + counts_transmitted);
        estimate = std::clamp(total / (model_.pulse_rate * span * model_.efficiency), 0.0, 1.0);
      }
    }
  }
  last_estimate_ = estimate;

  history_.push_back(estimate);
  while (history_.size() > window_length_) history_.pop_front();
  ++exposures_;

  const double updated = reflectivity_from_window(std::vector<double>(history_.begin(), history_.end()));
  pending_.push_back({clock_ + params_.feedback_latency, updated});

  exposure_elapsed_ = 0.0;
  input_integral_ = 0.0;
  reflected_integral_ = 0.0;
  reflectivity_integral_ = 0.0;
}

void Memristor::apply_due_updates() {
  const double slack = kTimeSlack * params_.exposure;
  while (!pending_.empty() && pending_.front().apply_time <= clock_ + slack) {
    reflectivity_ = pending_.front().reflectivity;
    pending_.pop_front();
  }
}

}  // namespace qmem

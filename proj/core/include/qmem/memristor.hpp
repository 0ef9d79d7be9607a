#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string_view>

namespace qmem {

/// How the sliding window is seeded before the first full window of
/// estimates exists.
enum class InitPolicy {
  NeutralHalf,    ///< history pre-filled with 0.5, so R starts at the fixed point
  GrowingWindow,  ///< mean over however many estimates exist (0.5 when none)
};

std::string_view to_string(InitPolicy p);
std::optional<InitPolicy> parse_init_policy(std::string_view name);

/// Which detected arms reconstruct the input population.
enum class Estimator {
  Reflected,  ///< reflected counts divided by the current reflectivity
  Combined,   ///< (reflected + transmitted) counts, no reflectivity division
};

std::string_view to_string(Estimator e);
std::optional<Estimator> parse_estimator(std::string_view name);

/// Below this reflectivity the reflected-count estimator is meaningless and
/// the previous input estimate is held.
inline constexpr double kReflectivityFloor = 1e-3;

/// Latency beyond this fraction of the exposure is outside the regime the
/// experiment was designed for.
inline constexpr double kFaithfulLatencyFraction = 0.05;

struct MemristorParams {
  double integration_window = 120.0;  ///< T, seconds
  double exposure = 4.0;              ///< tau, seconds
  double feedback_latency = 0.0;      ///< seconds
  InitPolicy init_policy = InitPolicy::NeutralHalf;

  /// Throws DomainError unless T > 0, 0 < tau <= T and latency >= 0.
  void validate() const;
  bool experiment_faithful() const noexcept {
    return feedback_latency <= kFaithfulLatencyFraction * exposure;
  }
  /// Number of exposure estimates averaged by the window, round(T/tau) >= 1.
  std::size_t window_length() const;
};

struct DetectionModel {
  double efficiency = 1.0;   ///< eta
  double pulse_rate = 79e6;  ///< Hz
  bool shot_noise = false;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::Reflected;

  void validate() const;
};

/// Mean of the window samples (left-rectangle over equally spaced exposure
/// estimates), clamped to [0,1]. An empty window yields the neutral 0.5.
double reflectivity_from_window(std::span<const double> history);

/// Input population reconstructed from reflected counts over one exposure:
/// counts / (pulse_rate * exposure * efficiency * reflectivity), clamped to
/// [0,1]. Returns `previous` when the reflectivity is under kReflectivityFloor
/// or the detection efficiency is zero.
double estimate_input(std::uint64_t counts_reflected, const DetectionModel& model,
                      double reflectivity, double exposure, double previous = 0.0);

/// Detected counts over one exposure for a mean arm population
/// `n_in * reflectivity`. Binomial with round(pulse_rate * exposure) trials
/// when shot noise is on, otherwise the rounded expectation.
std::uint64_t sample_counts(double n_in, double reflectivity, const DetectionModel& model,
                            double exposure, std::mt19937_64& rng);

struct StepResult {
  double transmitted = 0.0;
  double reflected = 0.0;
  double reflectivity = 0.0;  ///< reflectivity in force during the step
};

/// Single quantum memristor: a beam splitter whose reflectivity is the
/// sliding-window mean of exposure-averaged input estimates.
///
/// Each exposure estimate integrates the drive piecewise-linearly between the
/// samples passed to step(). At every exposure boundary a new reflectivity is
/// computed and scheduled to take effect `feedback_latency` later.
class Memristor {
 public:
  explicit Memristor(const MemristorParams& params, const DetectionModel& model = {});

  /// Advances by dt with input population n_in (sampled at the current
  /// clock). Throws DomainError for n_in outside [0,1], dt <= 0 or dt > tau.
  StepResult step(double n_in, double dt);

  double reflectivity() const noexcept { return reflectivity_; }
  double clock() const noexcept { return clock_; }
  const std::deque<double>& history() const noexcept { return history_; }
  std::size_t pending_updates() const noexcept { return pending_.size(); }
  std::size_t exposures_completed() const noexcept { return exposures_; }
  const MemristorParams& params() const noexcept { return params_; }
  const DetectionModel& detection() const noexcept { return model_; }

 private:
  struct PendingUpdate {
    double apply_time;
    double reflectivity;
  };

  void close_exposure();
  void apply_due_updates();

  MemristorParams params_;
  DetectionModel model_;
  std::mt19937_64 rng_;
  std::size_t window_length_;

  double reflectivity_ = 0.5;
  std::deque<double> history_;
  std::deque<PendingUpdate> pending_;
  double clock_ = 0.0;
  std::size_t exposures_ = 0;
  double last_estimate_ = 0.5;

  // Open exposure accumulators: integral of n_in, of R * n_in and of R.
  double exposure_elapsed_ = 0.0;
  double input_integral_ = 0.0;
  double reflected_integral_ = 0.0;
  double reflectivity_integral_ = 0.0;

  bool has_previous_ = false;
  double previous_input_ = 0.0;
  double previous_dt_ = 0.0;
  double previous_reflectivity_ = 0.5;
};

}  // namespace qmem

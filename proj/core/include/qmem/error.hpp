#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qmem {

/// A value outside the physical domain of an operation (population not in
/// [0,1], negative duration, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Photon number exceeds the enumeration capacity of a Fock ket.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares problem without a unique solution.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Not enough simulated time to extract a steady-state quantity.
class InsufficientDataError : public std::runtime_error {
 public:
  InsufficientDataError(const std::string& what, double required_duration)
      : std::runtime_error(what), required_duration_(required_duration) {}

  double required_duration() const noexcept { return required_duration_; }

 private:
  double required_duration_;
};

/// Scenario validation failure. Carries every problem found, each prefixed
/// with the path of the offending key (e.g. "chain[0].exposure_s: ...").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += '\n';
      out += e;
    }
    return out;
  }

  std::vector<std::string> errors_;
};

}  // namespace qmem

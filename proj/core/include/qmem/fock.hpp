#pragma once

#include <complex>
#include <compare>
#include <functional>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmem/source.hpp"

/// Exact few-photon Fock-space propagation through beam splitters, delays
/// and phase shifts, with threshold detection.
namespace qmem::fock {

using Amplitude = std::complex<double>;

/// Internal (polarisation / arrival-time) label. kPrincipal is shared by all
/// emissions; orthogonal_to(k) is a mode private to emission k, so photons
/// from different emissions overlap only through their principal parts.
inline constexpr int kPrincipal = 0;
constexpr int orthogonal_to(int emission) { return emission + 1; }

struct Mode {
  int spatial = 0;
  int time_bin = 0;
  int internal = kPrincipal;

  auto operator<=>(const Mode&) const = default;
};

/// Occupation configuration: sorted multiset of photon modes.
using Configuration = std::vector<Mode>;

inline constexpr int kDefaultMaxPhotons = 2;
inline constexpr double kPruneThreshold = 1e-15;

/// Superposition over occupation configurations, amplitudes in the
/// normalised Fock basis.
class Ket {
 public:
  explicit Ket(int max_photons = kDefaultMaxPhotons) : max_photons_(max_photons) {}

  static Ket vacuum(int max_photons = kDefaultMaxPhotons);

  /// Adds `amplitude` to the configuration (sorted internally). Throws
  /// CapacityError when the configuration holds more than max_photons.
  void add(Configuration config, Amplitude amplitude);

  double norm_squared() const;
  void prune(double threshold = kPruneThreshold);

  const std::map<Configuration, Amplitude>& terms() const noexcept { return terms_; }
  int max_photons() const noexcept { return max_photons_; }
  std::size_t size() const noexcept { return terms_.size(); }

 private:
  int max_photons_;
  std::map<Configuration, Amplitude> terms_;
};

struct WeightedKet {
  double weight;
  Ket ket;
};

/// Convex mixture of kets; weights sum to one.
struct MixedState {
  std::vector<WeightedKet> terms;

  double total_weight() const;
};

struct BeamSplitter {
  int a;
  int b;
  double reflectivity;
};
struct Delay {
  int spatial;
  int bins;
};
struct PhaseShift {
  int spatial;
  double phase;
};
/// Memristor beam splitter: `in` keeps sqrt(1-R), `feedback` receives sqrt(R).
struct MemristorTap {
  int in;
  int feedback;
  double reflectivity;
};

using Element = std::variant<BeamSplitter, Delay, PhaseShift, MemristorTap>;

/// Linear substitution on creation operators. BeamSplitter maps
///   a+ -> sqrt(1-R) a+ + sqrt(R) b+
///   b+ -> -sqrt(R) a+ + sqrt(1-R) b+
/// within each (time bin, internal) pair.
Ket apply(const Ket& ket, const Element& element);
MixedState apply(const MixedState& state, const Element& element);
MixedState apply(MixedState state, std::span<const Element> elements);

/// Moves every photon to map(mode). Used to reroute prepared emissions onto
/// other rails; amplitudes are renormalised when photons merge into one mode.
Ket remap(const Ket& ket, const std::function<Mode(const Mode&)>& map);
MixedState remap(const MixedState& state, const std::function<Mode(const Mode&)>& map);

/// Two emissions on `spatial`: emission 0 in bin 0, emission 1 in bin 1
/// carrying the relative phase. Impurity mixes in |0> and |1> per emission,
/// partial distinguishability splits each photon into sqrt(x) principal +
/// sqrt(1-x) private orthogonal with x = sqrt(v_hom).
MixedState prepare_two_pulse_source(const SourceModel& source, double relative_phase,
                                    int spatial = 0, int max_photons = kDefaultMaxPhotons);

struct Detector {
  int spatial;
  int time_bin;

  auto operator<=>(const Detector&) const = default;
};

/// Photons present in the detector's spatial mode and time bin, over all
/// internal labels.
int photons_at(const Configuration& config, const Detector& detector);

/// Threshold detector click probability; k photons click with 1-(1-eta)^k.
double click_probability(const MixedState& state, const Detector& detector, double efficiency);

/// Joint click/no-click distribution over the detectors, indexed by bitmask
/// (bit i set: detector i clicked). Sums to one.
std::vector<double> joint_click_distribution(const MixedState& state,
                                             std::span<const Detector> detectors,
                                             double efficiency);

/// Spatial layout of the self-homodyne pipeline.
inline constexpr int kShortArm = 0;  ///< source rail, interferometer input/output a
inline constexpr int kLongArm = 1;   ///< delayed arm, interferometer input/output b
inline constexpr int kFirstFeedback = 2;

/// Source -> memristor taps -> balanced interferometer with a one-bin delay
/// on the long arm -> threshold detection. Returns click probabilities for
/// both outputs at time bins 0, 1 and 2. Chain length must be 0, 1 or 2.
std::map<Detector, double> two_pulse_pipeline(const SourceModel& source,
                                              std::span<const double> reflectivities,
                                              double phase, double efficiency);

/// Network half of the pipeline (everything after the source), for reuse.
std::vector<Element> pipeline_elements(std::span<const double> reflectivities);

/// One line per configuration:
/// `spatial:bin:internal^count ... amplitude_re amplitude_im`.
std::string dump(const Ket& ket);

}  // namespace qmem::fock

#include "qmem/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qmem/error.hpp"

namespace qmem::fock {

namespace {

using Polynomial = std::map<Configuration, Amplitude>;

struct ImageTerm {
  Mode mode;
  double coefficient;
  Amplitude phase{1.0, 0.0};
};

// sqrt(prod_m n_m!) for a sorted configuration.
double occupation_factor(const Configuration& config) {
  double factor = 1.0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= config.size(); ++i) {
    if (i < config.size() && config[i] == config[i - 1]) {
      ++run;
      factor *= static_cast<double>(run);
    } else {
      run = 1;
    }
  }
  return std::sqrt(factor);
}

std::vector<ImageTerm> image_of(const Mode& mode, const Element& element) {
  return std::visit(
      [&](const auto& e) -> std::vector<ImageTerm> {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, BeamSplitter> || std::is_same_v<E, MemristorTap>) {
          int a = 0;
          int b = 0;
          if constexpr (std::is_same_v<E, BeamSplitter>) {
            a = e.a;
            b = e.b;
          } else {
            a = e.in;
            b = e.feedback;
          }
          const double r = std::sqrt(e.reflectivity);
          const double t = std::sqrt(1.0 - e.reflectivity);
          Mode to_a = mode;
          Mode to_b = mode;
          to_a.spatial = a;
          to_b.spatial = b;
          if (mode.spatial == a) return {{to_a, t}, {to_b, r}};
          if (mode.spatial == b) return {{to_a, -r}, {to_b, t}};
          return {{mode, 1.0}};
        } else if constexpr (std::is_same_v<E, Delay>) {
          Mode shifted = mode;
          if (mode.spatial == e.spatial) shifted.time_bin += e.bins;
          return {{shifted, 1.0}};
        } else {
          if (mode.spatial == e.spatial) return {{mode, 1.0, std::polar(1.0, e.phase)}};
          return {{mode, 1.0}};
        }
      },
      element);
}

void validate_element(const Element& element) {
  std::visit(
      [](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, BeamSplitter> || std::is_same_v<E, MemristorTap>) {
          if (!(e.reflectivity >= 0.0 && e.reflectivity <= 1.0))
            throw DomainError("beam splitter reflectivity must lie in [0,1]");
        }
        if constexpr (std::is_same_v<E, BeamSplitter>) {
          if (e.a == e.b) throw DomainError("beam splitter needs two distinct spatial modes");
        }
        if constexpr (std::is_same_v<E, MemristorTap>) {
          if (e.in == e.feedback) throw DomainError("memristor tap needs distinct modes");
        }
        if constexpr (std::is_same_v<E, Delay>) {
          if (e.bins < 0) throw DomainError("delay must be non-negative");
        }
      },
      element);
}

// Multiplies out prod_i (sum_j image_ij) for one monomial.
void expand(const std::vector<std::vector<ImageTerm>>& images, std::size_t index,
            Configuration& current, Amplitude coefficient, Polynomial& out) {
  if (index == images.size()) {
    Configuration sorted = current;
    std::sort(sorted.begin(), sorted.end());
    out[sorted] += coefficient;
    return;
  }
  for (const auto& term : images[index]) {
    if (term.coefficient == 0.0) continue;
    current.push_back(term.mode);
    expand(images, index + 1, current, coefficient * term.coefficient * term.phase, out);
    current.pop_back();
  }
}

Ket from_polynomial(const Polynomial& poly, int max_photons) {
  Ket ket(max_photons);
  for (const auto& [config, coefficient] : poly) ket.add(config, coefficient * occupation_factor(config));
  ket.prune();
  return ket;
}

}  // namespace

Ket Ket::vacuum(int max_photons) {
  Ket ket(max_photons);
  ket.add({}, 1.0);
  return ket;
}

void Ket::add(Configuration config, Amplitude amplitude) {
  if (static_cast<int>(config.size()) > max_photons_)
    throw CapacityError("configuration holds " + std::to_string(config.size()) +
                        " photons, capacity is " + std::to_string(max_photons_));
  std::sort(config.begin(), config.end());
  terms_[std::move(config)] += amplitude;
}

double Ket::norm_squared() const {
  double sum = 0.0;
  for (const auto& [config, amplitude] : terms_) sum += std::norm(amplitude);
  return sum;
}

void Ket::prune(double threshold) {
  std::erase_if(terms_, [threshold](const auto& kv) { return std::abs(kv.second) < threshold; });
}

double MixedState::total_weight() const {
  double sum = 0.0;
  for (const auto& term : terms) sum += term.weight;
  return sum;
}

Ket apply(const Ket& ket, const Element& element) {
  validate_element(element);
  Polynomial poly;
  std::vector<std::vector<ImageTerm>> images;
  Configuration scratch;
  for (const auto& [config, amplitude] : ket.terms()) {
    images.clear();
    for (const auto& mode : config) images.push_back(image_of(mode, element));
    expand(images, 0, scratch, amplitude / occupation_factor(config), poly);
  }
  return from_polynomial(poly, ket.max_photons());
}

MixedState apply(const MixedState& state, const Element& element) {
  MixedState out;
  out.terms.reserve(state.terms.size());
  for (const auto& term : state.terms) out.terms.push_back({term.weight, fock::apply(term.ket, element)});
  return out;
}

MixedState apply(MixedState state, std::span<const Element> elements) {
  for (const auto& element : elements) state = fock::apply(state, element);
  return state;
}

Ket remap(const Ket& ket, const std::function<Mode(const Mode&)>& map) {
  Polynomial poly;
  for (const auto& [config, amplitude] : ket.terms()) {
    Configuration moved;
    moved.reserve(config.size());
    for (const auto& mode : config) moved.push_back(map(mode));
    std::sort(moved.begin(), moved.end());
    poly[moved] += amplitude / occupation_factor(config);
  }
  return from_polynomial(poly, ket.max_photons());
}

MixedState remap(const MixedState& state, const std::function<Mode(const Mode&)>& map) {
  MixedState out;
  for (const auto& term : state.terms) out.terms.push_back({term.weight, remap(term.ket, map)});
  return out;
}

MixedState prepare_two_pulse_source(const SourceModel& source, double relative_phase,
                                    int spatial, int max_photons) {
  source.validate();
  const double alpha = std::sqrt(1.0 - source.beta_sq);
  const double beta = std::sqrt(source.beta_sq);
  const double x = std::sqrt(source.v_hom);
  const double principal = std::sqrt(x);
  const double orthogonal = std::sqrt(1.0 - x);

  // Per emission: weighted alternatives, each a list of (monomial, coeff).
  struct Alternative {
    double weight;
    std::vector<std::pair<Configuration, Amplitude>> monomials;
  };
  auto emission = [&](int k) {
    const Amplitude phase = k == 0 ? Amplitude{1.0} : std::polar(1.0, relative_phase);
    const Mode p{spatial, k, kPrincipal};
    const Mode o{spatial, k, orthogonal_to(k)};
    std::vector<Alternative> alts;
    alts.push_back({source.purity,
                    {{{}, alpha}, {{p}, beta * principal * phase}, {{o}, beta * orthogonal * phase}}});
    alts.push_back({(1.0 - source.purity) * (1.0 - source.beta_sq), {{{}, 1.0}}});
    alts.push_back({(1.0 - source.purity) * source.beta_sq,
                    {{{p}, principal * phase}, {{o}, orthogonal * phase}}});
    return alts;
  };

  MixedState state;
  for (const auto& first : emission(0)) {
    for (const auto& second : emission(1)) {
      const double weight = first.weight * second.weight;
      if (weight <= 0.0) continue;
      Polynomial poly;
      for (const auto& [m0, c0] : first.monomials) {
        if (c0 == Amplitude{}) continue;
        for (const auto& [m1, c1] : second.monomials) {
          if (c1 == Amplitude{}) continue;
          Configuration merged = m0;
          merged.insert(merged.end(), m1.begin(), m1.end());
          std::sort(merged.begin(), merged.end());
          poly[merged] += c0 * c1;
        }
      }
      state.terms.push_back({weight, from_polynomial(poly, max_photons)});
    }
  }
  return state;
}

int photons_at(const Configuration& config, const Detector& detector) {
  return static_cast<int>(std::count_if(config.begin(), config.end(), [&](const Mode& m) {
    return m.spatial == detector.spatial && m.time_bin == detector.time_bin;
  }));
}

double click_probability(const MixedState& state, const Detector& detector, double efficiency) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw DomainError("detection efficiency must lie in [0,1]");
  double p = 0.0;
  for (const auto& term : state.terms) {
    for (const auto& [config, amplitude] : term.ket.terms()) {
      const int k = photons_at(config, detector);
      if (k == 0) continue;
      p += term.weight * std::norm(amplitude) * (1.0 - std::pow(1.0 - efficiency, k));
    }
  }
  return p;
}

std::vector<double> joint_click_distribution(const MixedState& state,
                                             std::span<const Detector> detectors,
                                             double efficiency) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw DomainError("detection efficiency must lie in [0,1]");
  if (detectors.size() > 16) throw DomainError("too many detectors for a joint distribution");
  const std::size_t outcomes = std::size_t{1} << detectors.size();
  std::vector<double> dist(outcomes, 0.0);
  std::vector<double> miss(detectors.size());
  for (const auto& term : state.terms) {
    for (const auto& [config, amplitude] : term.ket.terms()) {
      const double p = term.weight * std::norm(amplitude);
      for (std::size_t d = 0; d < detectors.size(); ++d)
        miss[d] = std::pow(1.0 - efficiency, photons_at(config, detectors[d]));
      for (std::size_t outcome = 0; outcome < outcomes; ++outcome) {
        double q = p;
        for (std::size_t d = 0; d < detectors.size(); ++d)
          q *= (outcome >> d & 1U) ? 1.0 - miss[d] : miss[d];
        dist[outcome] += q;
      }
    }
  }
  return dist;
}

std::vector<Element> pipeline_elements(std::span<const double> reflectivities) {
  std::vector<Element> elements;
  for (std::size_t i = 0; i < reflectivities.size(); ++i)
    elements.emplace_back(MemristorTap{kShortArm, kFirstFeedback + static_cast<int>(i), reflectivities[i]});
  elements.emplace_back(BeamSplitter{kShortArm, kLongArm, 0.5});
  elements.emplace_back(Delay{kLongArm, 1});
  elements.emplace_back(BeamSplitter{kShortArm, kLongArm, 0.5});
  return elements;
}

std::map<Detector, double> two_pulse_pipeline(const SourceModel& source,
                                              std::span<const double> reflectivities,
                                              double phase, double efficiency) {
  if (reflectivities.size() > 2)
    throw DomainError("two-pulse pipeline supports chains of 0, 1 or 2 memristors");
  const auto elements = pipeline_elements(reflectivities);
  const MixedState out = fock::apply(prepare_two_pulse_source(source, phase, kShortArm), elements);
  std::map<Detector, double> clicks;
  for (int spatial : {kShortArm, kLongArm})
    for (int bin = 0; bin <= 2; ++bin)
      clicks[{spatial, bin}] = click_probability(out, {spatial, bin}, efficiency);
  return clicks;
}

std::string dump(const Ket& ket) {
  std::string out;
  char buffer[96];
  for (const auto& [config, amplitude] : ket.terms()) {
    std::size_t i = 0;
    bool first = true;
    while (i < config.size()) {
      std::size_t j = i;
      while (j < config.size() && config[j] == config[i]) ++j;
      std::snprintf(buffer, sizeof buffer, "%s%d:%d:%d^%zu", first ? "" : " ", config[i].spatial,
                    config[i].time_bin, config[i].internal, j - i);
      out += buffer;
      first = false;
      i = j;
    }
    if (config.empty()) out += "vac";
    std::snprintf(buffer, sizeof buffer, " %.17g %.17g\n", amplitude.real(), amplitude.imag());
    out += buffer;
  }
  return out;
}

}  // namespace qmem::fock

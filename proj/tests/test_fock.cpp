#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qmem/error.hpp"
#include "qmem/fock.hpp"
#include "qmem/homodyne.hpp"

using namespace qmem;
using namespace qmem::fock;
using doctest::Approx;

namespace {

Ket fock_11(int max_photons = 2) {
  Ket k(max_photons);
  k.add({Mode{0, 0}, Mode{1, 0}}, 1.0);
  return k;
}

Amplitude amplitude_of(const Ket& k, Configuration c) {
  std::sort(c.begin(), c.end());
  const auto it = k.terms().find(c);
  return it == k.terms().end() ? Amplitude{} : it->second;
}

double total_norm(const MixedState& s) {
  double n = 0.0;
  for (const auto& t : s.terms) n += t.weight * t.ket.norm_squared();
  return n;
}

}  // namespace

TEST_CASE("source preparation extremes") {
  SUBCASE("vacuum source") {
    for (double purity : {0.0, 0.4, 1.0}) {
      const auto s = prepare_two_pulse_source({0.0, purity, 0.7}, 1.0);
      CHECK(s.total_weight() == Approx(1.0));
      for (const auto& t : s.terms) {
        REQUIRE(t.ket.size() == 1);
        CHECK(t.ket.terms().begin()->first.empty());
        CHECK(std::abs(t.ket.terms().begin()->second) == Approx(1.0));
      }
    }
  }
  SUBCASE("pi pulses carry the relative phase") {
    const double phi = 0.7;
    const auto s = prepare_two_pulse_source({1.0, 1.0, 1.0}, phi);
    REQUIRE(s.terms.size() == 1);
    const auto& ket = s.terms[0].ket;
    REQUIRE(ket.size() == 1);
    const auto a = amplitude_of(ket, {Mode{0, 0}, Mode{0, 1}});
    CHECK(a.real() == Approx(std::cos(phi)));
    CHECK(a.imag() == Approx(std::sin(phi)));
  }
  SUBCASE("mixture weights and norms") {
    const auto s = prepare_two_pulse_source({0.5, 0.95, 0.915}, 0.3);
    CHECK(s.total_weight() == Approx(1.0).epsilon(1e-12));
    CHECK(total_norm(s) == Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS(prepare_two_pulse_source({1.2, 1.0, 1.0}, 0.0));
}

TEST_CASE("beam splitter limits") {
  const Ket in = fock_11();
  const Ket same = apply(in, BeamSplitter{0, 1, 0.0});
  CHECK(amplitude_of(same, {Mode{0, 0}, Mode{1, 0}}) == Amplitude{1.0});
  const Ket swapped = apply(in, BeamSplitter{0, 1, 1.0});
  CHECK(std::abs(amplitude_of(swapped, {Mode{0, 0}, Mode{1, 0}})) == Approx(1.0));
  CHECK(swapped.size() == 1);
}

TEST_CASE("two-photon amplitudes follow the matrix permanent") {
  // For a -> sqrt(T) a + sqrt(R) b, b -> -sqrt(R) a + sqrt(T) b the
  // coincidence amplitude is T - R and each bunched amplitude is
  // -/+ sqrt(2 R T).
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double r = u(rng);
    const double t = 1.0 - r;
    const Ket out = apply(fock_11(), BeamSplitter{0, 1, r});
    CHECK(amplitude_of(out, {Mode{0, 0}, Mode{1, 0}}).real() == Approx(t - r).epsilon(1e-12));
    CHECK(amplitude_of(out, {Mode{0, 0}, Mode{0, 0}}).real() == Approx(-std::sqrt(2.0 * r * t)).epsilon(1e-12));
    CHECK(amplitude_of(out, {Mode{1, 0}, Mode{1, 0}}).real() == Approx(std::sqrt(2.0 * r * t)).epsilon(1e-12));
  }
  const Ket hom = apply(fock_11(), BeamSplitter{0, 1, 0.5});
  CHECK(std::abs(amplitude_of(hom, {Mode{0, 0}, Mode{1, 0}})) <= 1e-15);
}

TEST_CASE("random networks preserve the norm") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    auto state = prepare_two_pulse_source({u(rng), u(rng), u(rng)}, 6.0 * u(rng));
    std::vector<Element> elements;
    for (int k = 0; k < 6; ++k) {
      const int a = static_cast<int>(3 * u(rng));
      const int b = (a + 1 + static_cast<int>(2 * u(rng))) % 3;
      switch (k % 3) {
        case 0: elements.emplace_back(BeamSplitter{a, b, u(rng)}); break;
        case 1: elements.emplace_back(Delay{a, static_cast<int>(3 * u(rng))}); break;
        default: elements.emplace_back(PhaseShift{a, 6.0 * u(rng)}); break;
      }
    }
    state = apply(state, std::span<const Element>(elements));
    CHECK(total_norm(state) == Approx(1.0).epsilon(1e-12));
    const Detector detectors[] = {{0, 0}, {1, 1}, {2, 2}, {0, 3}};
    const auto dist = joint_click_distribution(state, detectors, u(rng));
    double total = 0.0;
    for (double p : dist) total += p;
    CHECK(total == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("delay and phase") {
  Ket k;
  k.add({Mode{0, 0}}, 1.0);
  const Ket d = apply(k, Delay{0, 2});
  CHECK(amplitude_of(d, {Mode{0, 2}}) == Amplitude{1.0});
  const Ket p = apply(k, PhaseShift{0, std::numbers::pi / 2});
  CHECK(amplitude_of(p, {Mode{0, 0}}).imag() == Approx(1.0));
  const Ket untouched = apply(k, PhaseShift{1, 1.0});
  CHECK(amplitude_of(untouched, {Mode{0, 0}}) == Amplitude{1.0});
}

TEST_CASE("capacity is explicit") {
  Ket k(2);
  CHECK_THROWS_AS(k.add({Mode{0, 0}, Mode{0, 1}, Mode{1, 0}}, 1.0), CapacityError);
  Ket three(3);
  three.add({Mode{0, 0}, Mode{0, 0}, Mode{1, 0}}, 1.0);
  const Ket out = apply(three, BeamSplitter{0, 1, 0.3});
  CHECK(out.norm_squared() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("threshold detection") {
  MixedState vac{{{1.0, Ket::vacuum()}}};
  CHECK(click_probability(vac, {0, 0}, 0.7) == 0.0);
  Ket two;
  two.add({Mode{0, 1, 0}, Mode{0, 1, 1}}, 1.0);
  MixedState s{{{1.0, two}}};
  for (double eta : {0.0, 0.1, 0.5, 0.9, 1.0})
    CHECK(click_probability(s, {0, 1}, eta) == Approx(eta * (2.0 - eta)).epsilon(1e-15));
  CHECK_THROWS_AS(click_probability(s, {0, 1}, 1.5), DomainError);
}

TEST_CASE("pipeline reference values") {
  const double half[] = {0.5};
  CHECK(two_pulse_pipeline({1.0, 1.0, 1.0}, half, 0.0, 1.0).at({kShortArm, 1}) == Approx(0.21875).epsilon(1e-12));

  SUBCASE("empty chain fringe peaks at pi") {
    double best = -1.0;
    double best_phi = 0.0;
    for (int k = 0; k <= 64; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / 64;
      const double p = two_pulse_pipeline({0.5, 1.0, 1.0}, {}, phi, 1.0).at({kShortArm, 1});
      if (p > best) {
        best = p;
        best_phi = phi;
      }
    }
    CHECK(best_phi == Approx(std::numbers::pi));
  }
  SUBCASE("hand-counted pi-pulse bunching") {
    // Both photons reach the overlap bin with probability 1/4. Identical
    // photons bunch (click 1/8 + 1/4); distinguishable ones exit
    // independently (1/4 * 3/4 + 1/4).
    for (double phi : {0.0, 1.0, 2.5}) {
      CHECK(two_pulse_pipeline({1.0, 1.0, 1.0}, {}, phi, 1.0).at({kShortArm, 1}) == Approx(3.0 / 8.0));
      CHECK(two_pulse_pipeline({1.0, 1.0, 0.0}, {}, phi, 1.0).at({kShortArm, 1}) == Approx(7.0 / 16.0));
    }
  }
  SUBCASE("outer bins see single passes") {
    // Bin 0: emission 0 on the short arm, exits port a with 1/2.
    const auto clicks = two_pulse_pipeline({0.4, 1.0, 1.0}, {}, 0.3, 1.0);
    CHECK(clicks.at({kShortArm, 0}) == Approx(0.4 / 4.0));
    CHECK(clicks.at({kLongArm, 2}) == Approx(0.4 / 4.0));
  }
  const double three[] = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(two_pulse_pipeline({0.5, 1.0, 1.0}, three, 0.0, 1.0), DomainError);
}

TEST_CASE("distinguishability and purity in the lossy limit") {
  const SourceModel qd{0.5, 0.95, 0.915};
  const double half[] = {0.5};
  const double expected = 0.95 * 0.95 * 0.5 * std::sqrt(0.915);
  CHECK(homodyne::visibility_chain(qd, half, 1e-7) == Approx(expected).epsilon(1e-5));
  // Fully distinguishable photons keep only the first-order fringe.
  const SourceModel dist{0.5, 1.0, 0.0};
  CHECK(homodyne::visibility_chain(dist, half, 1e-7) == Approx(0.0).epsilon(1e-5));
}

TEST_CASE("remap merges photons with the bosonic factor") {
  Ket k;
  k.add({Mode{0, 0}, Mode{1, 0}}, 1.0);
  const Ket merged = remap(k, [](const Mode& m) { return Mode{0, m.time_bin, m.internal}; });
  CHECK(std::abs(amplitude_of(merged, {Mode{0, 0}, Mode{0, 0}})) == Approx(std::sqrt(2.0)));
}

TEST_CASE("dump format") {
  Ket big(3);
  big.add({Mode{1, 2, 0}, Mode{1, 2, 0}, Mode{0, 1, 3}}, {0.25, -0.5});
  big.add({}, 0.5);
  CHECK(dump(big) == "vac 0.5 0\n0:1:3^1 1:2:0^2 0.25 -0.5\n");
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qmem/error.hpp"
#include "qmem/signal.hpp"

using namespace qmem;
using doctest::Approx;

TEST_CASE("sin_squared reference points") {
  const auto s = SignalSpec::sin_squared(400.0);
  CHECK(s.sample(0.0) == 0.0);
  CHECK(s.sample(200.0) == Approx(1.0).epsilon(1e-15));
  CHECK(s.sample(100.0) == Approx(0.5).epsilon(1e-15));
  CHECK(s.sample(300.0) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("phase offset shifts every waveform identically") {
  for (auto w : {Waveform::SinSquared, Waveform::AbsSin, Waveform::Triangle, Waveform::Sawtooth,
                 Waveform::RaisedCosine}) {
    const SignalSpec base(w, 8.0);
    const SignalSpec shifted(w, 8.0, 2.0);
    for (double t = 0.0; t < 16.0; t += 0.25) CHECK(shifted.sample(t + 2.0) == base.sample(t));
  }
}

TEST_CASE("waveform shapes") {
  const SignalSpec tri(Waveform::Triangle, 4.0);
  CHECK(tri.sample(1.0) == 0.5);
  CHECK(tri.sample(2.0) == 1.0);
  CHECK(tri.sample(3.0) == 0.5);
  const SignalSpec saw(Waveform::Sawtooth, 4.0);
  CHECK(saw.sample(0.0) == 0.0);
  CHECK(saw.sample(3.0) == 0.75);
  const SignalSpec abs_sin(Waveform::AbsSin, 4.0);
  CHECK(abs_sin.sample(2.0) == Approx(1.0));
  CHECK(abs_sin.sample(1.0) == Approx(std::sqrt(0.5)));
  const SignalSpec hann(Waveform::RaisedCosine, 4.0);
  CHECK(hann.sample(1.0) == Approx(1.0));
  CHECK(hann.sample(0.5) == Approx(0.5));
  CHECK(hann.sample(3.0) == 0.0);
  CHECK(SignalSpec::constant(0.3).sample(12.5) == 0.3);
}

TEST_CASE("discretize") {
  SUBCASE("constant") {
    const auto d = discretize(SignalSpec::constant(0.5), SamplingGrid(1.0, 3.0));
    REQUIRE(d.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(d[k].first == static_cast<double>(k));
      CHECK(d[k].second == 0.5);
    }
  }
  SUBCASE("quarter periods") {
    const double expected[] = {0.0, 0.5, 1.0, 0.5, 0.0};
    for (auto w : {Waveform::SinSquared, Waveform::Triangle}) {
      const auto d = discretize(SignalSpec(w, 4.0), SamplingGrid(1.0, 4.0));
      REQUIRE(d.size() == 5);
      for (std::size_t k = 0; k < 5; ++k) CHECK(d[k].second == Approx(expected[k]).epsilon(1e-15));
    }
  }
}

TEST_CASE("samples stay in [0,1] and repeat every period") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> period_dist(0.5, 1000.0);
  std::uniform_real_distribution<double> time_dist(-5000.0, 5000.0);
  std::uniform_int_distribution<int> wave_dist(0, 5);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto w = static_cast<Waveform>(wave_dist(rng));
    const SignalSpec s(w, period_dist(rng), time_dist(rng) * 0.01, 0.25);
    const double v = s.sample(time_dist(rng));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // Integer period and dyadic times keep t + period representable.
  for (int w = 0; w < 6; ++w) {
    const SignalSpec s(static_cast<Waveform>(w), 400.0, 0.0, 0.7);
    for (double t = 0.0; t < 800.0; t += 3.125) CHECK(s.sample(t) == s.sample(t + 400.0));
  }
}

TEST_CASE("sin_squared mean over one period") {
  const auto s = SignalSpec::sin_squared(400.0);
  for (int n : {4, 10, 100, 1000}) {
    const double dt = 400.0 / n;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += s.sample(k * dt);
    CHECK(std::abs(sum / n - 0.5) <= 1e-12);
  }
}

TEST_CASE("pulse area mapping") {
  CHECK(pulse_area_to_population(0.0) == 0.0);
  CHECK(pulse_area_to_population(std::numbers::pi) == Approx(1.0));
  CHECK(pulse_area_to_population(std::numbers::pi / 2) == Approx(0.5));
  double previous = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double p = pulse_area_to_population(std::numbers::pi * k / 100.0);
    CHECK(p >= previous);
    previous = p;
  }
  CHECK_THROWS_AS(pulse_area_to_population(-0.1), DomainError);
  CHECK_THROWS_AS(pulse_area_to_population(3.2), DomainError);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(SignalSpec(Waveform::SinSquared, 0.0), DomainError);
  CHECK_THROWS_AS(SignalSpec(Waveform::Constant, 1.0, 0.0, 1.5), DomainError);
  CHECK_THROWS_AS(SamplingGrid(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(SamplingGrid(1.0, 1.0), DomainError);
  CHECK(SamplingGrid(0.1, 1.0).size() == 11);
  CHECK(SamplingGrid(0.5, 2.0, 10.0).time(2) == 11.0);
}

TEST_CASE("waveform names round trip") {
  for (int w = 0; w < 6; ++w) {
    const auto wave = static_cast<Waveform>(w);
    CHECK(parse_waveform(to_string(wave)) == wave);
  }
  CHECK_FALSE(parse_waveform("square").has_value());
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qmem/error.hpp"
#include "qmem/fock.hpp"
#include "qmem/homodyne.hpp"
#include "qmem/network.hpp"

using namespace qmem;
using namespace qmem::homodyne;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;
const double kBetas[] = {0.1, 0.3, 0.5, 0.7, 0.9};
const double kRefl[] = {0.0, 0.3, 0.7};
const double kPhases[] = {0.0, kPi / 2.0, kPi};

double overlap_click(const SourceModel& s, std::span<const double> refl, double phi, double eta) {
  return fock::two_pulse_pipeline(s, refl, phi, eta).at({fock::kShortArm, 1});
}

}  // namespace

TEST_CASE("closed-form visibilities") {
  CHECK(visibility_single(0.0, 0.3) == 1.0);
  CHECK(visibility_single(1.0, 1.0) == 0.0);
  CHECK(visibility_single(0.5, 1.0) == Approx(4.0 / 7.0).epsilon(1e-15));
  for (double b : kBetas)
    for (double t : {0.0, 0.4, 1.0}) CHECK(visibility_double(b, t, 1.0) == visibility_single(b, t));
  CHECK(visibility_double(0.5, 1.0, 1.0) == Approx(4.0 / 7.0).epsilon(1e-15));
  CHECK(visibility_double(0.3, 1e-9, 1e-9) == Approx(0.7).epsilon(1e-12));
}

TEST_CASE("click probabilities match enumeration") {
  const SourceModel pure{0.5, 1.0, 1.0};
  for (double b : kBetas)
    for (double phi : kPhases) {
      SourceModel s = pure;
      s.beta_sq = b;
      for (double r : kRefl) {
        const double one[] = {r};
        for (double eta : {1.0, 0.6, 0.05})
          CHECK(std::abs(overlap_click(s, one, phi, eta) - click_probability_single(b, r, phi, eta)) <= 1e-12);
        for (double r2 : kRefl) {
          const double two[] = {r, r2};
          CHECK(std::abs(overlap_click(s, two, phi, 1.0) - click_probability_double(b, r, r2, phi)) <= 1e-12);
        }
      }
    }
  CHECK(click_probability_single(1.0, 0.5, 0.0) == 0.21875);
  CHECK(click_probability_double(0.6, 0.4, 0.0, 1.3) == Approx(click_probability_single(0.6, 0.4, 1.3)));
}

TEST_CASE("visibilities match enumeration and depend on the product T1 T2") {
  for (double b : kBetas) {
    const SourceModel s{b, 1.0, 1.0};
    for (double r : kRefl) {
      const double one[] = {r};
      CHECK(std::abs(visibility_chain(s, one, 1.0) - visibility_single(b, 1.0 - r)) <= 1e-9);
      for (double r2 : kRefl) {
        const double two[] = {r, r2};
        CHECK(std::abs(visibility_chain(s, two, 1.0) - visibility_double(b, 1.0 - r, 1.0 - r2)) <= 1e-9);
      }
    }
    for (double t1 : {0.5, 0.6, 0.8, 1.0}) {
      const double product = 0.48;
      CHECK(std::abs(visibility_double(b, t1, product / t1) - visibility_double(b, product / t1, t1)) <= 1e-12);
      CHECK(std::abs(visibility_double(b, t1, product / t1) - visibility_single(b, product)) <= 1e-12);
    }
  }
}

TEST_CASE("realistic visibility") {
  CHECK(visibility_realistic({0.3, 1.0, 1.0}, 0.5, 0.0) == Approx(0.7).epsilon(1e-15));
  CHECK(visibility_realistic({0.0, 0.95, 0.915}, 0.5, 0.0) == Approx(0.9025 * std::sqrt(0.915)).epsilon(1e-12));
  CHECK(visibility_realistic({0.0, 0.95, 0.915}, 0.5, 1e-3) == Approx(0.9025 * std::sqrt(0.915)).epsilon(1e-3));
  for (double b : kBetas)
    for (double t : {0.2, 0.7, 1.0})
      CHECK(visibility_realistic({b, 1.0, 1.0}, t, 1.0) > visibility_realistic({b, 1.0, 1.0}, t, 1e-3));
  CHECK(visibility_realistic({0.4, 1.0, 1.0}, 0.6, 1.0) == Approx(visibility_single(0.4, 0.6)).epsilon(1e-12));
}

TEST_CASE("visibility decreases with the population") {
  for (double t : {0.1, 0.5, 1.0})
    for (double eta : {1e-3, 0.3, 1.0})
      for (double purity : {0.8, 1.0})
        for (double v : {0.5, 0.915, 1.0}) {
          double previous = 2.0;
          for (int k = 0; k <= 10; ++k) {
            const double nu = visibility_realistic({0.1 * k, purity, v}, t, eta);
            CHECK(nu < previous + 1e-15);
            previous = nu;
          }
        }
}

TEST_CASE("loss limit approaches the linear law") {
  std::vector<double> x, y;
  for (int k = 0; k <= 9; ++k) {
    x.push_back(0.1 * k);
    y.push_back(visibility_realistic({0.1 * k, 1.0, 1.0}, 0.5, 1e-3));
  }
  const auto line = fit_line(x, y);
  CHECK(line.slope == Approx(-1.0).epsilon(0.01));
  CHECK(line.intercept == Approx(1.0).epsilon(0.01));
}

TEST_CASE("purity fit") {
  const double purity = 0.95, v_hom = 0.915;
  auto curve_for = [&](double p) {
    VisibilityCurve c;
    for (int k = 0; k <= 9; ++k) c.push_back({0.1 * k, visibility_loss_limit({0.1 * k, p, v_hom}), std::nullopt});
    return c;
  };
  SUBCASE("noise-free round trip") {
    const auto fit = fit_purity(curve_for(purity), v_hom);
    CHECK(std::abs(fit.purity - purity) <= 1e-10);
    CHECK(fit.purity_stderr >= 0.0);
    CHECK(fit.residual_norm <= 1e-12);
    CHECK(fit.affine_slope == Approx(-purity * purity * std::sqrt(v_hom)));
  }
  SUBCASE("mixed source") {
    const auto fit = fit_purity(curve_for(0.0), v_hom);
    CHECK(fit.purity == 0.0);
  }
  SUBCASE("seeded noise") {
    int good = 0;
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> noise(0.0, 0.01);
      auto c = curve_for(purity);
      for (auto& p : c) {
        p.visibility += noise(rng);
        p.sigma = 0.01;
      }
      good += std::abs(fit_purity(c, v_hom).purity - purity) <= 0.01;
    }
    CHECK(good >= 95);
  }
  SUBCASE("degenerate designs") {
    CHECK_THROWS_AS(fit_purity({{0.1, 0.8, {}}, {0.2, 0.7, {}}}, v_hom), FitError);
    CHECK_THROWS_AS(fit_purity({{0.3, 0.8, {}}, {0.3, 0.7, {}}, {0.3, 0.6, {}}}, v_hom), FitError);
    CHECK_THROWS_AS(fit_purity(curve_for(purity), 0.0), DomainError);
  }
  const auto report = format_fit_report(fit_purity(curve_for(purity), v_hom), v_hom);
  CHECK(report.find("purity=0.95") == 0);
  CHECK(report.find("points=10\n") != std::string::npos);
}

TEST_CASE("fringe traces") {
  std::vector<double> phases;
  for (int k = 0; k < 100; ++k) phases.push_back(2.0 * kPi * k / 99.0);
  const double half[] = {0.5};

  const auto fringe = fringe_trace({0.5, 1.0, 1.0}, half, phases, 1.0);
  CHECK(fringe.channel_a.front() == Approx(fringe.channel_a.back()).epsilon(1e-12));
  const double endpoints[] = {0.0, kPi};
  const auto exact = fringe_trace({0.5, 1.0, 1.0}, half, endpoints, 1.0);
  CHECK(exact.visibility_a == Approx(visibility_realistic({0.5, 1.0, 1.0}, 0.5, 1.0)).epsilon(1e-12));
  CHECK(fringe.visibility_a <= exact.visibility_a + 1e-12);

  const auto flat = fringe_trace({1.0, 1.0, 1.0}, half, phases, 1e-6);
  CHECK(flat.visibility_a <= 1e-9);

  // Single-photon level: the two outputs are complementary.
  const auto dim = fringe_trace({1e-4, 1.0, 1.0}, {}, phases, 1.0);
  for (std::size_t k = 0; k < phases.size(); ++k)
    CHECK(dim.channel_a[k] + dim.channel_b[k] == Approx(dim.channel_a[0] + dim.channel_b[0]).epsilon(1e-6));
}

TEST_CASE("visibility hysteresis along a drive cycle") {
  ChainConfig c;
  c.nodes = {{120.0, 4.0, 0.0, InitPolicy::NeutralHalf}};
  const auto drive = SignalSpec::sin_squared(400.0);
  const auto trace = run_chain(c, drive, steady_state_grid(c, 400.0, 4.0));
  const std::size_t first = trace.steps() - 101;
  auto width = [&](double eta) {
    const auto nu = visibility_along_trace(trace, {0.5, 1.0, 1.0}, eta, 0, first);
    return pinch_check(make_loop(std::span(trace.n_in).subspan(first), nu)).max_branch_gap;
  };
  CHECK(width(1.0) > 0.01);
  CHECK(width(1e-3) < 1e-3);
  CHECK(contrast(std::vector<double>{}) == 0.0);
  CHECK(contrast(std::vector<double>{1.0, 3.0}) == 0.5);
}

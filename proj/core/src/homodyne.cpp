#include "qmem/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "qmem/error.hpp"
#include "qmem/fock.hpp"
#include "qmem/network.hpp"

namespace qmem {

void SourceModel::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(beta_sq)) throw DomainError("one-photon population must lie in [0,1]");
  if (!in_unit(purity)) throw DomainError("conditional purity must lie in [0,1]");
  if (!in_unit(v_hom)) throw DomainError("HOM visibility must lie in [0,1]");
}

namespace homodyne {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(what) + " must lie in [0,1]");
}

double overlap_click(const SourceModel& source, std::span<const double> reflectivities,
                     double phase, double efficiency) {
  const auto clicks = fock::two_pulse_pipeline(source, reflectivities, phase, efficiency);
  return clicks.at({fock::kShortArm, 1});
}

}  // namespace

double click_probability_single(double beta_sq, double reflectivity, double phase,
                                double efficiency) {
  const double b = beta_sq;
  const double r = reflectivity;
  const double t = 1.0 - r;
  const double s = std::sin(0.5 * phase);
  const double eta = efficiency;
  return (1.0 - b) * b * t * s * s * eta + b * b * r * t * eta / 2.0 + b * b * t * t * eta / 4.0 +
         b * b * t * t * eta * (2.0 - eta) / 8.0;
}

double click_probability_double(double beta_sq, double r1, double r2, double phase) {
  const double b = beta_sq;
  const double t1 = 1.0 - r1;
  const double t2 = 1.0 - r2;
  const double s = std::sin(0.5 * phase);
  return (1.0 - b) * b * t1 * t2 * s * s + b * b * r1 * t1 * t2 / 2.0 +
         b * b * r2 * t1 * t1 * t2 / 2.0 + 3.0 / 8.0 * b * b * t1 * t1 * t2 * t2;
}

double visibility_single(double beta_sq, double transmissivity) {
  require_unit(beta_sq, "beta_sq");
  require_unit(transmissivity, "transmissivity");
  return (4.0 - 4.0 * beta_sq) / (4.0 - beta_sq * transmissivity);
}

double visibility_double(double beta_sq, double t1, double t2) {
  require_unit(t1, "t1");
  require_unit(t2, "t2");
  return visibility_single(beta_sq, t1 * t2);
}

double visibility_loss_limit(const SourceModel& source) {
  source.validate();
  return source.purity * source.purity * (1.0 - source.beta_sq) * std::sqrt(source.v_hom);
}

double visibility_chain(const SourceModel& source, std::span<const double> reflectivities,
                        double efficiency) {
  require_unit(efficiency, "efficiency");
  if (efficiency == 0.0) return visibility_loss_limit(source);
  // The overlap-bin probability is A + B sin^2(phi/2), so phi = 0 and pi are
  // the extremes.
  const double low = overlap_click(source, reflectivities, 0.0, efficiency);
  const double high = overlap_click(source, reflectivities, std::numbers::pi, efficiency);
  const double hi = std::max(low, high);
  const double lo = std::min(low, high);
  if (hi + lo <= 0.0) return visibility_loss_limit(source);
  return (hi - lo) / (hi + lo);
}

double visibility_realistic(const SourceModel& source, double net_transmissivity,
                            double efficiency) {
  require_unit(net_transmissivity, "net transmissivity");
  const double r = 1.0 - net_transmissivity;
  return visibility_chain(source, std::span<const double>(&r, 1), efficiency);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw FitError("line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw FitError("line fit is degenerate: all abscissae coincide");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

PurityFit fit_purity(const VisibilityCurve& curve, double v_hom) {
  if (!(v_hom > 0.0 && v_hom <= 1.0)) throw DomainError("v_hom must lie in (0,1]");
  if (curve.size() < 3) throw FitError("purity fit needs at least three points");
  const bool distinct = std::any_of(curve.begin(), curve.end(), [&](const VisibilityPoint& p) {
    return p.beta_sq != curve.front().beta_sq;
  });
  if (!distinct) throw FitError("purity fit is degenerate: all beta_sq values coincide");

  const bool weighted = std::all_of(curve.begin(), curve.end(), [](const VisibilityPoint& p) {
    return p.sigma.has_value() && *p.sigma > 0.0;
  });

  double suu = 0.0;
  double suv = 0.0;
  for (const auto& p : curve) {
    const double w = weighted ? 1.0 / (*p.sigma * *p.sigma) : 1.0;
    const double u = 1.0 - p.beta_sq;
    suu += w * u * u;
    suv += w * u * p.visibility;
  }
  if (suu <= 0.0) throw FitError("purity fit is degenerate: no point below beta_sq = 1");

  PurityFit fit;
  fit.points = curve.size();
  fit.contrast = suv / suu;
  double rss = 0.0;
  for (const auto& p : curve) {
    const double w = weighted ? 1.0 / (*p.sigma * *p.sigma) : 1.0;
    const double r = p.visibility - fit.contrast * (1.0 - p.beta_sq);
    rss += w * r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  const double dof = static_cast<double>(curve.size() - 1);
  fit.contrast_stderr = weighted ? std::sqrt(1.0 / suu) : std::sqrt(rss / dof / suu);

  const double root_v = std::sqrt(v_hom);
  const double p_sq = std::max(0.0, fit.contrast) / root_v;
  fit.purity = std::min(1.0, std::sqrt(p_sq));
  fit.purity_stderr = fit.purity > 0.0 ? fit.contrast_stderr / (2.0 * fit.purity * root_v)
                                        : std::sqrt(fit.contrast_stderr / root_v);

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : curve) {
    xs.push_back(p.beta_sq);
    ys.push_back(p.visibility);
  }
  const LineFit line = fit_line(xs, ys);
  fit.affine_intercept = line.intercept;
  fit.affine_slope = line.slope;
  return fit;
}

double contrast(std::span<const double> series) {
  if (series.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*hi + *lo <= 0.0) return 0.0;
  return (*hi - *lo) / (*hi + *lo);
}

FringeTrace fringe_trace(const SourceModel& source, std::span<const double> reflectivities,
                         std::span<const double> phases, double efficiency) {
  FringeTrace trace;
  for (double phi : phases) {
    const auto clicks = fock::two_pulse_pipeline(source, reflectivities, phi, efficiency);
    trace.phase.push_back(phi);
    trace.channel_a.push_back(clicks.at({fock::kShortArm, 1}));
    trace.channel_b.push_back(clicks.at({fock::kLongArm, 1}));
  }
  trace.visibility_a = contrast(trace.channel_a);
  trace.visibility_b = contrast(trace.channel_b);
  return trace;
}

std::vector<double> visibility_along_trace(const Trace& trace, const SourceModel& source,
                                           double efficiency, std::size_t nodes,
                                           std::size_t first_step) {
  const std::size_t used = nodes == 0 ? trace.nodes() : std::min(nodes, trace.nodes());
  std::vector<double> out;
  for (std::size_t k = first_step; k < trace.steps(); ++k) {
    double transmissivity = 1.0;
    for (std::size_t i = 0; i < used; ++i) transmissivity *= 1.0 - trace.reflectivity[i][k];
    SourceModel at = source;
    at.beta_sq = trace.n_in[k];
    out.push_back(visibility_realistic(at, std::clamp(transmissivity, 0.0, 1.0), efficiency));
  }
  return out;
}

std::string format_fit_report(const PurityFit& fit, double v_hom) {
  char buffer[128];
  std::string out;
  auto line = [&](const char* key, double value) {
    std::snprintf(buffer, sizeof buffer, "%s=%.17g\n", key, value);
    out += buffer;
  };
  line("purity", fit.purity);
  line("purity_stderr", fit.purity_stderr);
  line("contrast", fit.contrast);
  line("contrast_stderr", fit.contrast_stderr);
  line("v_hom", v_hom);
  line("residual_norm", fit.residual_norm);
  line("affine_intercept", fit.affine_intercept);
  line("affine_slope", fit.affine_slope);
  std::snprintf(buffer, sizeof buffer, "points=%zu\n", fit.points);
  out += buffer;
  return out;
}

}  // namespace homodyne
}  // namespace qmem

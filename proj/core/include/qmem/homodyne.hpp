#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmem/source.hpp"

namespace qmem {

struct Trace;

namespace homodyne {

/// Click probability at the first interferometer output in the overlap time
/// bin, one memristor of reflectivity R in front:
///   (1-b) b T sin^2(phi/2) eta + b^2 R T eta/2 + b^2 T^2 eta/4 + b^2 T^2 eta(2-eta)/8
/// with b = beta_sq and T = 1 - R.
double click_probability_single(double beta_sq, double reflectivity, double phase,
                                double efficiency = 1.0);

/// Lossless two-memristor counterpart:
///   (1-b) b T1 T2 sin^2(phi/2) + b^2 R1 T1 T2/2 + b^2 R2 T1^2 T2/2 + 3/8 b^2 T1^2 T2^2
double click_probability_double(double beta_sq, double r1, double r2, double phase);

/// Lossless fringe visibility after one memristor: (4 - 4b) / (4 - b T).
double visibility_single(double beta_sq, double transmissivity);

/// Lossless visibility after two memristors: (4 - 4b) / (4 - b T1 T2).
double visibility_double(double beta_sq, double t1, double t2);

/// Visibility in the lossy limit: P^2 (1 - b) sqrt(V_HOM).
double visibility_loss_limit(const SourceModel& source);

/// Fringe contrast (max - min)/(max + min) of the overlap-bin click
/// probability for an imperfect source behind a net transmissivity, taken
/// from exact enumeration. efficiency == 0 returns visibility_loss_limit.
double visibility_realistic(const SourceModel& source, double net_transmissivity,
                            double efficiency);

/// Same contrast with an explicit chain of reflectivities (0, 1 or 2 nodes).
double visibility_chain(const SourceModel& source, std::span<const double> reflectivities,
                        double efficiency);

struct VisibilityPoint {
  double beta_sq = 0.0;
  double visibility = 0.0;
  std::optional<double> sigma;
};

using VisibilityCurve = std::vector<VisibilityPoint>;

struct PurityFit {
  double purity = 0.0;            ///< projected to [0,1]
  double purity_stderr = 0.0;
  double contrast = 0.0;          ///< fitted P^2 sqrt(V_HOM), the slope in (1 - beta_sq)
  double contrast_stderr = 0.0;
  double residual_norm = 0.0;
  /// Unconstrained nu = intercept + slope * beta_sq, for diagnostics.
  double affine_intercept = 0.0;
  double affine_slope = 0.0;
  std::size_t points = 0;
};

/// Least squares of nu = c (1 - beta_sq) (zero at beta_sq = 1), then
/// P = sqrt(c / sqrt(v_hom)). Weighted by 1/sigma^2 when every point has a
/// positive sigma. Throws FitError with fewer than three points or when all
/// beta_sq coincide, DomainError when v_hom is outside (0,1].
PurityFit fit_purity(const VisibilityCurve& curve, double v_hom);

/// Ordinary least squares y = intercept + slope x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct FringeTrace {
  std::vector<double> phase;
  std::vector<double> channel_a;  ///< first output, overlap bin
  std::vector<double> channel_b;  ///< second output, overlap bin
  double visibility_a = 0.0;
  double visibility_b = 0.0;
};

/// Overlap-bin click probabilities at both interferometer outputs for each
/// relative phase.
FringeTrace fringe_trace(const SourceModel& source, std::span<const double> reflectivities,
                         std::span<const double> phases, double efficiency);

/// Contrast of a sampled series, (max - min)/(max + min); 0 for an empty or
/// all-zero series.
double contrast(std::span<const double> series);

/// Fringe visibility at trace steps [first_step, end): beta_sq follows the
/// chain input and the first `nodes` memristors (all when 0) set the net
/// transmissivity. Purity and v_hom come from `source`.
std::vector<double> visibility_along_trace(const Trace& trace, const SourceModel& source,
                                           double efficiency, std::size_t nodes = 0,
                                           std::size_t first_step = 0);

/// Key-value text report of a fit, one `key=value` per line.
std::string format_fit_report(const PurityFit& fit, double v_hom);

}  // namespace homodyne
}  // namespace qmem

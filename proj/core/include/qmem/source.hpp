#pragma once

namespace qmem {

/// Emitted vacuum--one-photon qubit ensemble.
///
/// rho = P |psi><psi| + (1 - P) diag(1 - beta_sq, beta_sq) with
/// |psi> = alpha|0> + beta|1>; photons from different emissions overlap with
/// amplitude sqrt(v_hom).
struct SourceModel {
  double beta_sq = 0.5;  ///< one-photon population |beta|^2
  double purity = 1.0;   ///< conditional purity P
  double v_hom = 1.0;    ///< Hong-Ou-Mandel visibility

  /// Throws DomainError if any field is outside [0,1].
  void validate() const;
};

}  // namespace qmem

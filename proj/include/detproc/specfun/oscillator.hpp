#pragma once

#include <optional>
#include <vector>

namespace detproc::specfun {

/// Largest degree the oscillator recurrences accept. Beyond this the
/// O(k) recurrence error budget no longer supports 1e-12 relative accuracy.
inline constexpr int kMaxOscillatorDegree = 100000;

/// Hermite oscillator function φ_k(x) = h_k^{-1/2} e^{-x²/2} H_k(x),
/// h_k = √π 2^k k!. Orthonormal on ℝ.
///
/// Evaluated by the normalized three-term recurrence with the Gaussian
/// weight carried along and an explicit running log-scale, so neither
/// H_k nor e^{-x²/2} is ever formed on its own. Values that are genuinely
/// below the double range come back as 0.
double hermite_phi(int k, double x);

/// φ_0(x), …, φ_kmax(x) from a single recurrence sweep.
std::vector<double> hermite_phi_table(int kmax, double x);

/// Laguerre oscillator function
/// φ_k^ν(x) = √(Γ(k+1)/Γ(ν+k+1)) x^{ν/2} L_k^ν(x) e^{-x/2}, x ≥ 0, ν > -1.
/// Orthonormal on ℝ_+.
double laguerre_phi(int k, double nu, double x);

/// φ_0^ν(x), …, φ_kmax^ν(x).
std::vector<double> laguerre_phi_table(int kmax, double nu, double x);

/// Degree (and Laguerre parameter, when present) of an oscillator function.
struct OscillatorIndex {
  int k = 0;
  std::optional<double> nu;

  /// Throws DomainError on k < 0 or nu <= -1.
  void validate() const;
  /// φ_k(x) or φ_k^ν(x) depending on whether nu is set.
  double operator()(double x) const;
};

}  // namespace detproc::specfun

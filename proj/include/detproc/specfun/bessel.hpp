#pragma once

namespace detproc::specfun {

/// Ai(x). Accurate to ~1e-13 relative away from the zeros for |x| ≤ 100.
double airy(double x);
/// Ai′(x).
double airy_prime(double x);

/// Bessel function of the first kind J_ν(x), ν > -1, x ≥ 0.
double bessel_j(double nu, double x);
/// J_ν(x) for any real order, x > 0 (the Bessel-kernel diagonal needs J_{ν-1}).
double bessel_j_any(double nu, double x);
/// dJ_ν/dx. For x = 0 and -1 < ν < 1, ν ≠ 0 the derivative is infinite.
double bessel_j_prime(double nu, double x);

/// Exponentially scaled modified Bessel function e^{-z} I_ν(z), z ≥ 0, ν > -1.
///
/// Computed on the real axis directly: the ascending series (all terms
/// positive, so no cancellation) for moderate z and the Hankel asymptotic
/// expansion for large z.
double bessel_i_scaled(double nu, double z);

}  // namespace detproc::specfun

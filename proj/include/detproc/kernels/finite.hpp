#pragma once

#include <utility>

namespace detproc::kernels {

/// Hard cap on the number of terms summed directly in the s > t branch, as a
/// multiple of N. Past it the complement of the closed-form full sum is used.
inline constexpr int kComplementCapFactor = 10;

/// Kernel of the Dyson model started from N particles at the origin:
///   s ≤ t:  (2s)^{-1/2} Σ_{k<N} (t/s)^{k/2} φ_k(x/√(2s)) φ_k(y/√(2t))
///   s > t: -(2s)^{-1/2} Σ_{k≥N} (same terms)
/// The tail sum is truncated once (t/s)^{k/2} < 1e-14. If that needs more
/// than kComplementCapFactor·N terms, Mehler's formula for the full sum is
/// used and the first N terms are subtracted.
double finite_hermite_kernel(int N, double s, double x, double t, double y);

/// Noncolliding squared Bessel analog with Laguerre functions φ_k^ν and
/// scale 2s, ratio (t/s)^k; the closed form for the full sum is the
/// Hille–Hardy formula.
double finite_laguerre_kernel(int N, double nu, double s, double x, double t, double y);

/// ρ^N_GUE(t, x) = K_N(t, x; t, x).
double gue_density(int N, double t, double x);

/// ρ^N_sc(t, x) = √(4tN - x²)/(2πt) on |x| ≤ 2√(tN).
double semicircle(int N, double t, double x);

/// ρ̂^N_sc(x) = (1/π)√(-x(1 + x/(4N^{2/3}))) for -4N^{2/3} ≤ x < 0.
double semicircle_edge(int N, double x);

/// ρ^N_A(x) = ρ^N_GUE(N^{1/3}, 2N^{2/3} + x).
double rho_A(int N, double x);

/// Both sides of the Christoffel–Darboux identity at one point:
///   lhs = Σ_{k<N} φ_k(x)²,  rhs = N φ_N(x)² - √(N(N+1)) φ_{N+1}(x) φ_{N-1}(x).
std::pair<double, double> christoffel_darboux(int N, double x);

}  // namespace detproc::kernels

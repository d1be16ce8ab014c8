#pragma once

namespace detproc::kernels {

/// Index of a space-time kernel argument.
struct SpaceTimePoint {
  double t = 0.0;
  double x = 0.0;
};

/// sin(π(y-x))/(π(y-x)), equal to 1 on the diagonal.
double sine_kernel(double x, double y);

/// Extended sine kernel with density 1:
///   t > s:  ∫_0^1 e^{π²u²(t-s)/2} cos(πu(y-x)) du
///   t = s:  sine_kernel(x, y)
///   t < s: -∫_1^∞ e^{π²u²(t-s)/2} cos(πu(y-x)) du
double extended_sine_kernel(double s, double x, double t, double y);

/// Bessel kernel K_{J_ν}(x, y), x, y ≥ 0.
double bessel_kernel(double nu, double x, double y);

/// Extended Bessel kernel:
///   s < t:  ∫_0^1 e^{-2u(s-t)} J_ν(2√(ux)) J_ν(2√(uy)) du
///   s = t:  bessel_kernel
///   s > t: -∫_1^∞ e^{-2u(s-t)} J_ν(2√(ux)) J_ν(2√(uy)) du
double extended_bessel_kernel(double nu, double s, double x, double t, double y);

/// Airy kernel (Ai(x)Ai′(y) - Ai′(x)Ai(y))/(x - y).
double airy_kernel(double x, double y);

/// Diagonal of the Airy kernel: Ai′(x)² - x Ai(x)².
double airy_density(double x);

/// Extended Airy kernel:
///   t ≥ s:  ∫_0^∞ e^{-u(t-s)/2} Ai(u+x) Ai(u+y) du
///   t < s: -∫_{-∞}^0 e^{-u(t-s)/2} Ai(u+x) Ai(u+y) du
double extended_airy_kernel(double s, double x, double t, double y);

}  // namespace detproc::kernels

#pragma once

#include <complex>
#include <variant>

namespace detproc::specfun {

using cplx = std::complex<double>;

/// Point mass δ(y - at): the t = 0 branch of a transition kernel. Kept as its
/// own type so a quadrature can never silently sample it as a number.
struct DeltaMass {
  double at = 0.0;
};

/// p_sin(t, y|x) = (2π|t|)^{-1/2} exp{-(x-y)²/(2t)}, complex x, y allowed.
/// Throws DistributionalBranchError at t = 0.
cplx heat_kernel_psin(double t, cplx x, cplx y);
double heat_kernel_psin(double t, double x, double y);

/// Same, returning DeltaMass for t = 0 (real arguments only).
std::variant<double, DeltaMass> heat_transition(double t, double x, double y);

/// Squared Bessel transition density p^{(ν)}(t, y|x) of the 2(ν+1)-dimensional
/// process, ν > -1, x, y ≥ 0, t ≠ 0. The x = 0 branch is the gamma density.
/// For t < 0 the formula is evaluated literally (growing exponential).
double bessel_transition(double nu, double t, double x, double y);
std::variant<double, DeltaMass> bessel_transition_tagged(double nu, double t, double x, double y);

/// Backward kernel p^{(ν)}(-t, u|y) for t > 0 continued to u < 0:
///   (1/2t) (|u|/y)^{ν/2} e^{(u+y)/(2t)} J_ν(√(|u|y)/t),
/// and the gamma-type limit |u|^ν e^{u/(2t)}/((2t)^{ν+1}Γ(ν+1)) at y = 0.
/// Integrates to one over u < 0 and has mean y - 2(ν+1)t.
double bessel_backward_continued(double nu, double t, double u, double y);

/// q(s, t, d) = (2π|t-s|)^{-1/2} exp[-d²/(2(t-s)) + (t+s)d/4 - (t-s)(t+s)²/32].
double drift_kernel_q(double s, double t, double d);
cplx drift_kernel_q(double s, double t, cplx d);

}  // namespace detproc::specfun

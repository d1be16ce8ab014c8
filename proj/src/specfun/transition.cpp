#include "detproc/specfun/transition.hpp"

#include <cmath>
#include <numbers>

#include "detproc/error.hpp"
#include "detproc/specfun/bessel.hpp"

namespace detproc::specfun {

cplx heat_kernel_psin(double t, cplx x, cplx y) {
  if (t == 0.0) throw DistributionalBranchError("heat_kernel_psin: t = 0 is a point mass");
  const cplx d = x - y;
  return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * std::abs(t));
}

double heat_kernel_psin(double t, double x, double y) {
  if (t == 0.0) throw DistributionalBranchError("heat_kernel_psin: t = 0 is a point mass");
  const double d = x - y;
  return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * std::abs(t));
}

std::variant<double, DeltaMass> heat_transition(double t, double x, double y) {
  if (t == 0.0) return DeltaMass{x};
  return heat_kernel_psin(t, x, y);
}

double bessel_transition(double nu, double t, double x, double y) {
  if (!(nu > -1.0)) throw DomainError("bessel_transition: nu must be > -1");
  if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("bessel_transition: x, y must be >= 0");
  if (t == 0.0) throw DistributionalBranchError("bessel_transition: t = 0 is a point mass");
  const double at = std::abs(t);
  if (x == 0.0) {
    if (y == 0.0) return nu == 0.0 ? 1.0 / (2.0 * at) : (nu > 0.0 ? 0.0 : INFINITY);
    return std::exp(nu * std::log(y) - (nu + 1.0) * std::log(2.0 * at) - std::lgamma(nu + 1.0) - y / (2.0 * t));
  }
  if (y == 0.0) {
    // (y/x)^{ν/2} I_ν(√(xy)/|t|) behaves like y^ν as y → 0.
    if (nu > 0.0) return 0.0;
    if (nu < 0.0) return INFINITY;
    return std::exp(-x / (2.0 * t)) / (2.0 * at);
  }
  const double z = std::sqrt(x * y) / at;
  // I_ν(z) = e^z · bessel_i_scaled, folded into the exponent.
  const double log_rest = 0.5 * nu * std::log(y / x) - (x + y) / (2.0 * t) + z;
  return std::exp(log_rest) * bessel_i_scaled(nu, z) / (2.0 * at);
}

std::variant<double, DeltaMass> bessel_transition_tagged(double nu, double t, double x, double y) {
  if (t == 0.0) return DeltaMass{x};
  return bessel_transition(nu, t, x, y);
}

double bessel_backward_continued(double nu, double t, double u, double y) {
  if (!(nu > -1.0)) throw DomainError("bessel_backward_continued: nu must be > -1");
  if (!(t > 0.0)) throw DomainError("bessel_backward_continued: t must be > 0");
  if (!(u <= 0.0) || !(y >= 0.0)) throw DomainError("bessel_backward_continued: need u <= 0 <= y");
  const double au = -u;
  if (y == 0.0) {
    if (au == 0.0) return nu == 0.0 ? 1.0 / (2.0 * t) : (nu > 0.0 ? 0.0 : INFINITY);
    return std::exp(nu * std::log(au) - (nu + 1.0) * std::log(2.0 * t) - std::lgamma(nu + 1.0) + u / (2.0 * t));
  }
  if (au == 0.0) {
    if (nu > 0.0) return 0.0;
    if (nu < 0.0) return INFINITY;
    return std::exp(y / (2.0 * t)) / (2.0 * t);
  }
  const double z = std::sqrt(au * y) / t;
  return std::exp(0.5 * nu * std::log(au / y) + (u + y) / (2.0 * t)) * bessel_j(nu, z) / (2.0 * t);
}

double drift_kernel_q(double s, double t, double d) {
  if (s == t) throw DistributionalBranchError("drift_kernel_q: s = t is a point mass");
  const double h = t - s, w = t + s;
  return std::exp(-d * d / (2.0 * h) + w * d / 4.0 - h * w * w / 32.0) /
         std::sqrt(2.0 * std::numbers::pi * std::abs(h));
}

cplx drift_kernel_q(double s, double t, cplx d) {
  if (s == t) throw DistributionalBranchError("drift_kernel_q: s = t is a point mass");
  const double h = t - s, w = t + s;
  return std::exp(-d * d / (2.0 * h) + w * d / 4.0 - h * w * w / 32.0) /
         std::sqrt(2.0 * std::numbers::pi * std::abs(h));
}

}  // namespace detproc::specfun

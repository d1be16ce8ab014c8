#include "detproc/kernels/classical.hpp"

#include <cmath>
#include <utility>
#include <numbers>
#include <string>

#include "detproc/error.hpp"
#include "detproc/quadrature.hpp"
#include "detproc/specfun/bessel.hpp"

namespace detproc::kernels {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAbsTol = 1e-13;
constexpr double kRelTol = 1e-12;
// Beyond this many units of integration length the Gaussian or exponential
// tail is handled by subtracting the full-line closed form instead.
constexpr double kDirectLimit = 200.0;

template <class F>
double checked(F&& f, double a, double b, const char* who) {
  auto r = quad::integrate(f, a, b, kAbsTol, kRelTol, 20000);
  if (!r.converged && r.abs_error > 1e-9 * std::max(1.0, std::abs(r.value)))
    throw NumericalError(std::string(who) + ": quadrature did not converge (error estimate " +
                         std::to_string(r.abs_error) + ")");
  return r.value;
}

void check_nonneg(double x, double y, const char* who) {
  if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError(std::string(who) + ": x and y must be >= 0");
}

double jj(double nu, double u, double x, double y) {
  return specfun::bessel_j(nu, 2.0 * std::sqrt(u * x)) * specfun::bessel_j(nu, 2.0 * std::sqrt(u * y));
}

// ∫_0^1 e^{-cu} J_ν(2√(ux)) J_ν(2√(uy)) du with u = v², which softens the
// u^ν endpoint behaviour for ν < 0
double jj_unit(double nu, double c, double x, double y, const char* who) {
  return checked([&](double v) { return 2.0 * v * std::exp(-c * v * v) * jj(nu, v * v, x, y); }, 0.0, 1.0, who);
}

}  // namespace

double sine_kernel(double x, double y) {
  const double d = kPi * (y - x);
  if (std::abs(d) < 1e-4) return 1.0 - d * d / 6.0 + d * d * d * d / 120.0;
  return std::sin(d) / d;
}

double extended_sine_kernel(double s, double x, double t, double y) {
  if (t == s) return sine_kernel(x, y);
  const double b = kPi * (y - x);
  if (t > s) {
    const double a = kPi * kPi * (t - s) / 2.0;
    return checked([&](double u) { return std::exp(a * u * u) * std::cos(b * u); }, 0.0, 1.0, "extended_sine_kernel");
  }
  const double a = kPi * kPi * (s - t) / 2.0;
  auto f = [&](double u) { return std::exp(-a * u * u) * std::cos(b * u); };
  // e^{-aU²} < e^{-40}; the remaining tail is below 1e-17/(aU).
  const double U = std::sqrt(40.0 / a);
  if (U - 1.0 <= kDirectLimit) return U <= 1.0 ? 0.0 : -checked(f, 1.0, U, "extended_sine_kernel");
  // ∫_1^∞ = ∫_0^∞ - ∫_0^1, the full half-line integral in closed form.
  const double full = 0.5 * std::sqrt(kPi / a) * std::exp(-b * b / (4.0 * a));
  return -(full - checked(f, 0.0, 1.0, "extended_sine_kernel"));
}

double bessel_kernel(double nu, double x, double y) {
  if (!(nu > -1.0)) throw DomainError("bessel_kernel: nu must be > -1");
  check_nonneg(x, y, "bessel_kernel");
  if (x > y) std::swap(x, y);  // exact symmetry
  if (x == 0.0 || y == 0.0) {
    // K(0, y) = lim: J_ν(2√x) ~ x^{ν/2}/Γ(ν+1)
    if (nu > 0.0) return 0.0;
    if (nu < 0.0) return INFINITY;
    const double z = x == 0.0 ? y : x;
    if (z == 0.0) return 1.0;
    return specfun::bessel_j(1.0, 2.0 * std::sqrt(z)) / std::sqrt(z);
  }
  const double sx = std::sqrt(x), sy = std::sqrt(y);
  if (x == y) {
    const double z = 2.0 * sx;
    const double j = specfun::bessel_j(nu, z);
    return j * j - specfun::bessel_j_any(nu + 1.0, z) * specfun::bessel_j_any(nu - 1.0, z);
  }
  if (std::abs(x - y) < 1e-3 * (1.0 + std::max(x, y))) {
    // the difference quotient loses digits here; use ∫_0^1 J_ν(2√(ux))J_ν(2√(uy)) du
    return jj_unit(nu, 0.0, x, y, "bessel_kernel");
  }
  const double jx = specfun::bessel_j(nu, 2.0 * sx), jy = specfun::bessel_j(nu, 2.0 * sy);
  const double dx = specfun::bessel_j_prime(nu, 2.0 * sx), dy = specfun::bessel_j_prime(nu, 2.0 * sy);
  return (jx * sy * dy - sx * dx * jy) / (x - y);
}

double extended_bessel_kernel(double nu, double s, double x, double t, double y) {
  if (!(nu > -1.0)) throw DomainError("extended_bessel_kernel: nu must be > -1");
  check_nonneg(x, y, "extended_bessel_kernel");
  if (s == t) return bessel_kernel(nu, x, y);
  const double c = 2.0 * (s - t);
  auto f = [&](double u) { return std::exp(-c * u) * jj(nu, u, x, y); };
  if (s < t) return jj_unit(nu, c, x, y, "extended_bessel_kernel");
  const double U = 1.0 + 40.0 / c;
  if (U - 1.0 <= kDirectLimit) return -checked(f, 1.0, U, "extended_bessel_kernel");
  // ∫_0^∞ e^{-cu} J_ν(2√(ux)) J_ν(2√(uy)) du = e^{-(x+y)/c} I_ν(2√(xy)/c) / c
  const double z = 2.0 * std::sqrt(x * y) / c;
  double full;
  if (x == 0.0 || y == 0.0) {
    const double w = x + y;
    full = nu == 0.0 ? std::exp(-w / c) / c : (nu > 0.0 ? 0.0 : INFINITY);
  } else {
    full = std::exp(z - (x + y) / c) * specfun::bessel_i_scaled(nu, z) / c;
  }
  return -(full - jj_unit(nu, c, x, y, "extended_bessel_kernel"));
}

double airy_density(double x) {
  const double a = specfun::airy(x), d = specfun::airy_prime(x);
  return d * d - x * a * a;
}

double airy_kernel(double x, double y) {
  if (x > y) std::swap(x, y);
  const double h = 0.5 * (x - y);
  if (std::abs(h) < 1e-3) {
    // symmetric Taylor expansion about the midpoint m, using Ai'' = m Ai
    const double m = 0.5 * (x + y);
    const double a = specfun::airy(m), d = specfun::airy_prime(m);
    const double k0 = d * d - m * a * a;
    return k0 + h * h * (a * d / 3.0 + 2.0 / 3.0 * m * k0);
  }
  const double ax = specfun::airy(x), ay = specfun::airy(y);
  const double dx = specfun::airy_prime(x), dy = specfun::airy_prime(y);
  return (ax * dy - dx * ay) / (x - y);
}

double extended_airy_kernel(double s, double x, double t, double y) {
  if (t == s) return airy_kernel(x, y);
  const double lo = std::min(x, y);
  // Ai(z) < 1e-36 for z ≥ 25
  const double U = std::max(25.0 - lo, 1.0);
  auto prod = [&](double u) { return specfun::airy(u + x) * specfun::airy(u + y); };
  if (t > s) {
    const double r = (t - s) / 2.0;
    return checked([&](double u) { return std::exp(-r * u) * prod(u); }, 0.0, U, "extended_airy_kernel");
  }
  const double tau = (s - t) / 2.0;
  const double V = 40.0 / tau;
  if (V <= kDirectLimit)
    return -checked([&](double v) { return std::exp(-tau * v) * prod(-v); }, 0.0, V, "extended_airy_kernel");
  // -∫_{-∞}^0 = ∫_0^∞ - ∫_ℝ, with
  // ∫_ℝ e^{uτ} Ai(u+x) Ai(u+y) du = (4πτ)^{-1/2} exp(τ³/12 - (x+y)τ/2 - (x-y)²/(4τ)).
  const double full = std::exp(tau * tau * tau / 12.0 - (x + y) * tau / 2.0 - (x - y) * (x - y) / (4.0 * tau)) /
                      std::sqrt(4.0 * kPi * tau);
  const double half = checked([&](double u) { return std::exp(tau * u) * prod(u); }, 0.0, U, "extended_airy_kernel");
  return half - full;
}

}  // namespace detproc::kernels

#include "detproc/specfun/bessel.hpp"

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <cmath>
#include <numbers>

#include "detproc/error.hpp"

namespace detproc::specfun {

double airy(double x) {
  if (!std::isfinite(x)) throw DomainError("airy: x must be finite");
  return boost::math::airy_ai(x);
}

double airy_prime(double x) {
  if (!std::isfinite(x)) throw DomainError("airy_prime: x must be finite");
  return boost::math::airy_ai_prime(x);
}

double bessel_j(double nu, double x) {
  if (!(nu > -1.0)) throw DomainError("bessel_j: nu must be > -1");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("bessel_j: x must be finite and >= 0");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : INFINITY;
  }
  return boost::math::cyl_bessel_j(nu, x);
}

double bessel_j_any(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_j_any: x must be finite and > 0");
  return boost::math::cyl_bessel_j(nu, x);
}

double bessel_j_prime(double nu, double x) {
  if (!(nu > -1.0)) throw DomainError("bessel_j_prime: nu must be > -1");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("bessel_j_prime: x must be finite and >= 0");
  if (x == 0.0) {
    if (nu == 0.0 || nu > 1.0) return 0.0;
    if (nu == 1.0) return 0.5;
    return nu > 0.0 ? INFINITY : -INFINITY;
  }
  return boost::math::cyl_bessel_j_prime(nu, x);
}

double bessel_i_scaled(double nu, double z) {
  if (!(nu > -1.0)) throw DomainError("bessel_i_scaled: nu must be > -1");
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("bessel_i_scaled: z must be finite and >= 0");
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : INFINITY;
  }

  if (z > std::max(30.0, 2.0 * nu * nu + 20.0)) {
    // e^{-z} I_ν(z) ~ (2πz)^{-1/2} Σ_k (-1)^k a_k(ν) / z^k,
    // a_k = Π_{j≤k} (4ν² - (2j-1)²) / (k! 8^k).
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
      const double next = -term * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * z);
      if (std::abs(next) > std::abs(term)) break;
      term = next;
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
  }

  // Ascending series with the e^{-z} factor folded into the leading term.
  const double q = 0.25 * z * z;
  double term = std::exp(nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) - z);
  double sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (term < 1e-17 * sum && k > q / (k + nu)) break;
  }
  return sum;
}

}  // namespace detproc::specfun

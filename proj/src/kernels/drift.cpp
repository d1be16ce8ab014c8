#include "detproc/kernels/drift.hpp"

#include <cmath>

#include "detproc/error.hpp"
#include "detproc/kernels/finite.hpp"
#include "detproc/quadrature.hpp"

namespace detproc::kernels {

DriftDensity semicircle_drift(int N) {
  if (N < 1) throw ParameterError("semicircle_drift: N must be >= 1");
  DriftDensity d;
  d.id = "semicircle";
  d.N = N;
  d.rho = [N](double x) { return semicircle_edge(N, x); };
  d.lower = -4.0 * std::pow(static_cast<double>(N), 2.0 / 3.0);
  d.mass = N;
  d.inv_moment = -std::cbrt(static_cast<double>(N));
  return d;
}

DriftDensity zero_drift() {
  DriftDensity d;
  d.id = "zero";
  d.rho = [](double) { return 0.0; };
  return d;
}

DriftDensity make_drift_density(std::string id, int N, std::function<double(double)> rho, double lower) {
  if (!(lower < 0.0)) throw ParameterError("make_drift_density: lower must be < 0");
  DriftDensity d;
  d.id = std::move(id);
  d.N = N;
  d.rho = std::move(rho);
  d.lower = lower;
  const double R = std::sqrt(-lower);
  auto m = quad::integrate([&](double r) { return 2.0 * r * d.rho(-r * r); }, 0.0, R, 1e-12, 1e-12);
  auto i = quad::integrate([&](double r) { return r > 0.0 ? -2.0 * d.rho(-r * r) / r : 0.0; }, 0.0, R, 1e-12, 1e-12);
  if (!m.converged || !i.converged) throw NumericalError("make_drift_density: quadrature did not converge");
  d.mass = m.value;
  d.inv_moment = i.value;
  return d;
}

}  // namespace detproc::kernels

#include "detproc/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <numbers>
#include <string>

#include "detproc/error.hpp"
#include "detproc/specfun/oscillator.hpp"

namespace detproc::quad {
namespace {

// Legendre P_n and P_n' at x via the standard recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

Eigen::VectorXd tridiagonal_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("quadrature: tridiagonal eigensolve failed");
  return es.eigenvalues();
}

}  // namespace

Rule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw ParameterError("gauss_legendre: n must be >= 1");
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = legendre(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    r.nodes[lo] = c - h * x;
    r.nodes[hi] = c + h * x;
    r.weights[lo] = r.weights[hi] = h * w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = c;
  return r;
}

Rule composite_gauss_legendre(int n, int panels, double a, double b) {
  if (panels < 1) throw ParameterError("composite_gauss_legendre: panels must be >= 1");
  Rule out;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    Rule r = gauss_legendre(n, a + p * h, a + (p + 1) * h);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

Rule gauss_hermite_scaled(int n) {
  if (n < 1) throw ParameterError("gauss_hermite: n must be >= 1");
  // Golub–Welsch for the weight e^{-x²}: zero diagonal, off-diagonal √(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  Eigen::VectorXd x = tridiagonal_eigenvalues(diag, sub);

  Rule r;
  for (int i = 0; i < n; ++i) {
    double xi = x[i];
    // Newton polish on φ_n, using φ_n' = √(2n) φ_{n-1} - x φ_n.
    for (int it = 0; it < 3; ++it) {
      auto t = specfun::hermite_phi_table(n, xi);
      const double f = t[static_cast<std::size_t>(n)];
      const double df = std::sqrt(2.0 * n) * t[static_cast<std::size_t>(n - 1)] - xi * f;
      if (df == 0.0) break;
      xi -= f / df;
    }
    auto t = specfun::hermite_phi_table(n - 1, xi);
    double s = 0.0;
    for (double v : t) s += v * v;
    r.nodes.push_back(xi);
    r.weights.push_back(1.0 / s);
  }
  return r;
}

Rule gauss_laguerre_scaled(int n, double alpha) {
  if (n < 1) throw ParameterError("gauss_laguerre: n must be >= 1");
  if (!(alpha > -1.0)) throw DomainError("gauss_laguerre: alpha must be > -1");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0 + alpha;
  for (int k = 1; k < n; ++k) sub[k - 1] = -std::sqrt(k * (k + alpha));
  Eigen::VectorXd x = tridiagonal_eigenvalues(diag, sub);

  Rule r;
  for (int i = 0; i < n; ++i) {
    double xi = x[i];
    // Newton polish on φ_n^α; x (φ_n/w)' = n φ_n/w - √(n(n+α)) φ_{n-1}/w.
    for (int it = 0; it < 3; ++it) {
      auto t = specfun::laguerre_phi_table(n, alpha, xi);
      const double f = t[static_cast<std::size_t>(n)];
      const double g = n * f - std::sqrt(n * (n + alpha)) * t[static_cast<std::size_t>(n - 1)];
      if (g == 0.0) break;
      xi -= xi * f / g;
    }
    auto t = specfun::laguerre_phi_table(n - 1, alpha, xi);
    double s = 0.0;
    for (double v : t) s += v * v;
    r.nodes.push_back(xi);
    r.weights.push_back(1.0 / s);
  }
  return r;
}

}  // namespace detproc::quad

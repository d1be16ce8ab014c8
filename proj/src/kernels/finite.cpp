#include "detproc/kernels/finite.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "detproc/error.hpp"
#include "detproc/specfun/bessel.hpp"
#include "detproc/specfun/oscillator.hpp"

namespace detproc::kernels {
namespace {

constexpr double kTailCut = 1e-14;

void check_common(int N, double s, double t, const char* who) {
  if (N < 1) throw ParameterError(std::string(who) + ": N must be >= 1");
  if (!(s > 0.0) || !(t > 0.0)) throw DomainError(std::string(who) + ": s and t must be > 0");
}

// Number of terms k needed for ratio^k < kTailCut.
int tail_end(double ratio) {
  return static_cast<int>(std::ceil(std::log(kTailCut) / std::log(ratio)));
}

// Σ_{k=lo}^{hi-1} ratio^k A_k B_k with A, B tables.
double weighted_sum(const std::vector<double>& A, const std::vector<double>& B, double ratio, int lo, int hi) {
  double acc = 0.0;
  double w = std::pow(ratio, lo);
  for (int k = lo; k < hi; ++k) {
    acc += w * A[static_cast<std::size_t>(k)] * B[static_cast<std::size_t>(k)];
    w *= ratio;
  }
  return acc;
}

}  // namespace

double finite_hermite_kernel(int N, double s, double x, double t, double y) {
  check_common(N, s, t, "finite_hermite_kernel");
  const double a = x / std::sqrt(2.0 * s), b = y / std::sqrt(2.0 * t);
  const double pre = 1.0 / std::sqrt(2.0 * s);
  const double r = std::sqrt(t / s);
  if (s <= t) {
    auto A = specfun::hermite_phi_table(N - 1, a), B = specfun::hermite_phi_table(N - 1, b);
    return pre * weighted_sum(A, B, r, 0, N);
  }
  const int end = tail_end(r);
  if (end <= kComplementCapFactor * N && end <= specfun::kMaxOscillatorDegree) {
    if (end <= N) return 0.0;
    auto A = specfun::hermite_phi_table(end, a), B = specfun::hermite_phi_table(end, b);
    return -pre * weighted_sum(A, B, r, N, end);
  }
  // Mehler: Σ_k r^k φ_k(a) φ_k(b) = (π(1-r²))^{-1/2} exp{-[(1+r²)(a²+b²) - 4rab]/(2(1-r²))}
  const double om = 1.0 - r * r;
  const double full = std::exp(-((1.0 + r * r) * (a * a + b * b) - 4.0 * r * a * b) / (2.0 * om)) /
                      std::sqrt(std::numbers::pi * om);
  auto A = specfun::hermite_phi_table(N - 1, a), B = specfun::hermite_phi_table(N - 1, b);
  return -pre * (full - weighted_sum(A, B, r, 0, N));
}

double finite_laguerre_kernel(int N, double nu, double s, double x, double t, double y) {
  check_common(N, s, t, "finite_laguerre_kernel");
  if (!(nu > -1.0)) throw DomainError("finite_laguerre_kernel: nu must be > -1");
  if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("finite_laguerre_kernel: x and y must be >= 0");
  const double a = x / (2.0 * s), b = y / (2.0 * t);
  const double pre = 1.0 / (2.0 * s);
  const double r = t / s;
  if (s <= t) {
    auto A = specfun::laguerre_phi_table(N - 1, nu, a), B = specfun::laguerre_phi_table(N - 1, nu, b);
    return pre * weighted_sum(A, B, r, 0, N);
  }
  const int end = tail_end(r);
  if (end <= kComplementCapFactor * N && end <= specfun::kMaxOscillatorDegree) {
    if (end <= N) return 0.0;
    auto A = specfun::laguerre_phi_table(end, nu, a), B = specfun::laguerre_phi_table(end, nu, b);
    return -pre * weighted_sum(A, B, r, N, end);
  }
  // Hille–Hardy: Σ_k r^k φ_k^ν(a) φ_k^ν(b)
  //   = r^{-ν/2}/(1-r) exp(-(a+b)(1+r)/(2(1-r))) I_ν(2√(abr)/(1-r))
  const double om = 1.0 - r;
  const double z = 2.0 * std::sqrt(a * b * r) / om;
  const double full = std::pow(r, -0.5 * nu) / om * std::exp(z - (a + b) * (1.0 + r) / (2.0 * om)) *
                      specfun::bessel_i_scaled(nu, z);
  auto A = specfun::laguerre_phi_table(N - 1, nu, a), B = specfun::laguerre_phi_table(N - 1, nu, b);
  return -pre * (full - weighted_sum(A, B, r, 0, N));
}

double gue_density(int N, double t, double x) {
  check_common(N, t, t, "gue_density");
  auto P = specfun::hermite_phi_table(N - 1, x / std::sqrt(2.0 * t));
  double acc = 0.0;
  for (double v : P) acc += v * v;
  return acc / std::sqrt(2.0 * t);
}

double semicircle(int N, double t, double x) {
  if (N < 1) throw ParameterError("semicircle: N must be >= 1");
  if (!(t > 0.0)) throw DomainError("semicircle: t must be > 0");
  const double q = 4.0 * t * N - x * x;
  return q > 0.0 ? std::sqrt(q) / (2.0 * std::numbers::pi * t) : 0.0;
}

double semicircle_edge(int N, double x) {
  if (N < 1) throw ParameterError("semicircle_edge: N must be >= 1");
  if (!(x < 0.0)) return 0.0;
  const double q = -x * (1.0 + x / (4.0 * std::pow(static_cast<double>(N), 2.0 / 3.0)));
  return q > 0.0 ? std::sqrt(q) / std::numbers::pi : 0.0;
}

double rho_A(int N, double x) {
  const double n13 = std::cbrt(static_cast<double>(N));
  return gue_density(N, n13, 2.0 * n13 * n13 + x);
}

std::pair<double, double> christoffel_darboux(int N, double x) {
  if (N < 1) throw ParameterError("christoffel_darboux: N must be >= 1");
  auto P = specfun::hermite_phi_table(N + 1, x);
  double lhs = 0.0;
  for (int k = 0; k < N; ++k) lhs += P[static_cast<std::size_t>(k)] * P[static_cast<std::size_t>(k)];
  const auto n = static_cast<std::size_t>(N);
  const double rhs = N * P[n] * P[n] - std::sqrt(static_cast<double>(N) * (N + 1)) * P[n + 1] * P[n - 1];
  return {lhs, rhs};
}

}  // namespace detproc::kernels

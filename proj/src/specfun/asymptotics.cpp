#include "detproc/specfun/asymptotics.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "detproc/error.hpp"
#include "detproc/specfun/bessel.hpp"
#include "detproc/specfun/oscillator.hpp"

namespace detproc::specfun {
namespace {

constexpr double kPi = std::numbers::pi;

double log_airy_u(int k) {
  return std::lgamma(3.0 * k + 0.5) - k * std::log(54.0) - std::lgamma(k + 1.0) -
         std::lgamma(k + 0.5);
}

// Signed k-th term of the named series at z, computed in log space because
// u_k itself overflows long before the term does.
double series_term(double z, AirySeries which, int k) {
  const double lz = std::log(std::abs(z));
  auto uv_term = [&](int j, bool use_v) {
    double mag = std::exp(log_airy_u(j) - j * lz);
    double sign = (z < 0.0 && j % 2 == 1) ? -1.0 : 1.0;
    if (use_v) sign *= -(6.0 * j + 1.0) / (6.0 * j - 1.0);
    return sign * mag;
  };
  const double alt = (k % 2 == 0) ? 1.0 : -1.0;
  switch (which) {
    case AirySeries::L: return uv_term(k, false);
    case AirySeries::M: return uv_term(k, true);
    case AirySeries::P: return alt * uv_term(2 * k, false);
    case AirySeries::Q: return alt * uv_term(2 * k + 1, false);
    case AirySeries::R: return alt * uv_term(2 * k, true);
    case AirySeries::S: return alt * uv_term(2 * k + 1, true);
  }
  return 0.0;
}

void check_z(double z, const char* who) {
  if (!std::isfinite(z) || z == 0.0) throw DomainError(std::string(who) + ": z must be finite and nonzero");
}

// Coefficient table shared by all pr_hermite calls; immutable once built.
constexpr int kMaxPROrder = 16;
const PRCoefficients<double>& pr_table() {
  static const PRCoefficients<double> t = pr_coefficients<double>(kMaxPROrder + 1, 0);
  return t;
}

// Γ(m + (n+1)/2) / Γ(1/2).
double gamma_ratio(int n, int m) {
  return std::exp(std::lgamma(m + 0.5 * (n + 1)) - std::lgamma(0.5));
}

// Order-n contribution Σ_m C¹_{nm} sin{phase + D¹_{nm}}.
double osc_order(int n, int N, double theta) {
  if (n % 2 == 1) return 0.0;
  const auto& tab = pr_table();
  const double s = std::sin(theta);
  const double phase = 0.5 * (N + 1) * (2.0 * theta - std::sin(2.0 * theta));
  double acc = 0.0;
  for (int m = 0; m <= n; ++m) {
    const double a = tab.a_nm(n, m);
    if (a == 0.0) continue;
    const double C = gamma_ratio(n, m) / (std::pow(N + 1.0, 0.5 * n) * std::pow(s, m + 0.5 * n)) * a;
    const double D = kPi / 4 - theta / 2 - (2.0 * m + n) * (kPi / 4 + theta / 2);
    acc += C * std::sin(phase + D);
  }
  return acc;
}

// Order-n contribution Σ_m C²_{nm}.
double exp_order(int n, int N, double theta) {
  if (n % 2 == 1) return 0.0;
  const auto& tab = pr_table();
  const double base = -2.0 / (1.0 - std::exp(-2.0 * theta));
  double acc = 0.0;
  for (int m = 0; m <= n; ++m) {
    const double a = tab.a_nm(n, m);
    if (a == 0.0) continue;
    acc += gamma_ratio(n, m) / std::pow(N + 1.0, 0.5 * n) * std::pow(base, m + n / 2) * a;
  }
  return acc;
}

double edge_y(int N, double x) {
  return (std::sqrt(2.0 * (N + 1)) - x) * std::sqrt(2.0) * std::pow(static_cast<double>(N), 1.0 / 6.0);
}

double edge_x(int N, double y) {
  return std::sqrt(2.0 * (N + 1)) - y / (std::sqrt(2.0) * std::pow(static_cast<double>(N), 1.0 / 6.0));
}

// The five basis functions multiplying c10, c11, c20, c21, c22 in B(y, x).
std::array<double, 5> turning_basis(double y, double x) {
  const double ai = airy(-y), aip = airy_prime(-y);
  const double h1 = std::pow(0.5 * x, -2.0 / 3.0), h2 = h1 * h1;
  return {h1 * aip, h1 * y * y * ai, h2 * aip, h2 * y * y * ai, h2 * y * y * y * aip};
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::oscillatory: return "oscillatory";
    case Regime::exponential: return "exponential";
    case Regime::turning: return "turning";
  }
  return "?";
}

double airy_u(int k) {
  if (k < 0) throw DomainError("airy_u: k must be >= 0");
  return std::exp(log_airy_u(k));
}

double airy_v(int k) {
  return -(6.0 * k + 1.0) / (6.0 * k - 1.0) * airy_u(k);
}

double airy_series(double z, AirySeries which, int terms) {
  check_z(z, "airy_series");
  if (terms < 1) throw ParameterError("airy_series: terms must be >= 1");
  if (terms > kMaxAirySeriesTerms) throw CapacityError("airy_series: terms exceeds cap of " + std::to_string(kMaxAirySeriesTerms));
  double sum = 0.0;
  for (int k = 0; k < terms; ++k) sum += series_term(z, which, k);
  return sum;
}

AsymptoticResult airy_series_optimal(double z, AirySeries which) {
  check_z(z, "airy_series_optimal");
  double sum = 0.0;
  double prev = INFINITY;
  int k = 0;
  for (; k < kMaxAirySeriesTerms; ++k) {
    const double t = series_term(z, which, k);
    // Q and S start at a nonzero odd power; never stop on the very first term.
    if (k > 0 && std::abs(t) >= prev) break;
    if (k > 0 && t == 0.0) break;
    sum += t;
    prev = std::abs(t);
  }
  const double next = k < kMaxAirySeriesTerms ? std::abs(series_term(z, which, k)) : prev;
  AsymptoticResult r;
  r.value = sum;
  r.order_L = k;
  r.error_estimate = std::min(prev, next);
  r.regime = z > 0 ? Regime::oscillatory : Regime::exponential;
  return r;
}

AsymptoticResult airy_asymptotic(double x) {
  if (!std::isfinite(x) || x == 0.0) throw DomainError("airy_asymptotic: x must be finite and nonzero");
  const double ax = std::abs(x);
  const double zeta = 2.0 / 3.0 * std::pow(ax, 1.5);
  AsymptoticResult r;
  if (x > 0) {
    const double pre = std::exp(-zeta) / (2.0 * std::sqrt(kPi) * std::pow(ax, 0.25));
    auto s = airy_series_optimal(-zeta, AirySeries::L);
    r = {pre * s.value, Regime::exponential, s.order_L, pre * s.error_estimate};
  } else {
    const double pre = 1.0 / (std::sqrt(kPi) * std::pow(ax, 0.25));
    const double a = zeta - kPi / 4;
    auto P = airy_series_optimal(zeta, AirySeries::P);
    auto Q = airy_series_optimal(zeta, AirySeries::Q);
    r = {pre * (std::sin(a) * Q.value + std::cos(a) * P.value), Regime::oscillatory,
         std::min(P.order_L, Q.order_L), pre * (P.error_estimate + Q.error_estimate)};
  }
  return r;
}

AsymptoticResult airy_prime_asymptotic(double x) {
  if (!std::isfinite(x) || x == 0.0) throw DomainError("airy_prime_asymptotic: x must be finite and nonzero");
  const double ax = std::abs(x);
  const double zeta = 2.0 / 3.0 * std::pow(ax, 1.5);
  AsymptoticResult r;
  if (x > 0) {
    const double pre = -std::pow(ax, 0.25) * std::exp(-zeta) / (2.0 * std::sqrt(kPi));
    auto s = airy_series_optimal(-zeta, AirySeries::M);
    r = {pre * s.value, Regime::exponential, s.order_L, std::abs(pre) * s.error_estimate};
  } else {
    const double pre = std::pow(ax, 0.25) / std::sqrt(kPi);
    const double a = zeta - kPi / 4;
    auto R = airy_series_optimal(zeta, AirySeries::R);
    auto S = airy_series_optimal(zeta, AirySeries::S);
    r = {pre * (std::sin(a) * R.value - std::cos(a) * S.value), Regime::oscillatory,
         std::min(R.order_L, S.order_L), pre * (R.error_estimate + S.error_estimate)};
  }
  return r;
}

double airy_density_two_term(double x) {
  if (!(x > 0.0)) throw DomainError("airy_density_two_term: x must be > 0");
  const double zp = 2.0 / 3.0 * std::pow(x, 1.5) - kPi / 4;
  return std::sqrt(x) / kPi * (1.0 + std::sin(2.0 * zp) / (4.0 * std::pow(x, 1.5)));
}

double turning_B(double y, double x, const TurningConstants& c) {
  if (!(x > 0.0)) throw DomainError("turning_B: x must be > 0");
  const auto b = turning_basis(y, x);
  return airy(-y) + c.c10 * b[0] + c.c11 * b[1] + c.c20 * b[2] + c.c21 * b[3] + c.c22 * b[4];
}

TurningConstants fit_turning_constants(std::span<const int> Ns, std::span<const double> ys) {
  const auto rows = static_cast<Eigen::Index>(Ns.size() * ys.size());
  if (rows < 5) throw ParameterError("fit_turning_constants: need at least five (N, y) samples");
  Eigen::MatrixXd A(rows, 5);
  Eigen::VectorXd rhs(rows);
  Eigen::Index i = 0;
  for (int N : Ns) {
    for (double y : ys) {
      const double x = edge_x(N, y);
      const auto b = turning_basis(y, x);
      for (int j = 0; j < 5; ++j) A(i, j) = b[static_cast<std::size_t>(j)];
      rhs[i] = hermite_phi(N, x) / (std::pow(2.0, 0.25) * std::pow(static_cast<double>(N), -1.0 / 12.0)) - airy(-y);
      ++i;
    }
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
  return {c[0], c[1], c[2], c[3], c[4]};
}

Regime select_regime(int N, double x, const RegimeThresholds& th) {
  const double edge = std::sqrt(2.0 * (N + 1));
  const double ax = std::abs(x);
  const double bar = std::pow(static_cast<double>(N), th.exponent);
  if (ax < edge) {
    const double s = std::sin(std::acos(ax / edge));
    if (N * s * s * s >= bar) return Regime::oscillatory;
  } else if (ax > edge) {
    const double sh = std::sinh(std::acosh(ax / edge));
    if (N * sh * sh * sh >= bar) return Regime::exponential;
  }
  if (std::abs(edge_y(N, ax)) <= std::pow(static_cast<double>(N), th.turning_exponent)) return Regime::turning;
  throw AmbiguousRegimeError("pr_hermite: x = " + std::to_string(x) + " is outside every regime for N = " +
                             std::to_string(N) + "; pass force_regime to choose one");
}

AsymptoticResult pr_hermite(int N, double x, int order_L, const PROptions& opt) {
  if (N < 10) throw DomainError("pr_hermite: N must be >= 10");
  if (order_L < 1) throw ParameterError("pr_hermite: order_L must be >= 1");
  if (order_L > kMaxPROrder) throw CapacityError("pr_hermite: order_L exceeds " + std::to_string(kMaxPROrder));
  if (!std::isfinite(x)) throw DomainError("pr_hermite: x must be finite");

  // φ_N(-x) = (-1)^N φ_N(x)
  const double sign = (x < 0.0 && N % 2 == 1) ? -1.0 : 1.0;
  const double ax = std::abs(x);
  const double edge = std::sqrt(2.0 * (N + 1));
  const Regime regime = opt.force_regime ? *opt.force_regime : select_regime(N, ax, opt.thresholds);

  AsymptoticResult r;
  r.regime = regime;
  r.order_L = order_L;
  switch (regime) {
    case Regime::oscillatory: {
      if (ax > edge) throw DomainError("pr_hermite: oscillatory form needs |x| < sqrt(2(N+1))");
      const double theta = std::acos(ax / edge);
      const double pre = std::pow(2.0 / N, 0.25) / std::sqrt(kPi * std::sin(theta));
      double sum = 0.0;
      for (int n = 0; n < order_L; ++n) sum += osc_order(n, N, theta);
      const int nxt = order_L % 2 == 0 ? order_L : order_L + 1;
      r.value = sign * pre * sum;
      r.error_estimate = pre * (std::abs(osc_order(nxt, N, theta)) + std::abs(sum) / N);
      break;
    }
    case Regime::exponential: {
      if (ax < edge) throw DomainError("pr_hermite: exponential form needs |x| > sqrt(2(N+1))");
      const double theta = std::acosh(ax / edge);
      const double pre = std::pow(1.0 / (2.0 * N), 0.25) / std::sqrt(2.0 * kPi * std::sinh(theta)) *
                         std::exp(0.5 * (N + 1) * (2.0 * theta - std::sinh(2.0 * theta)) - 0.5 * theta);
      double sum = 0.0;
      for (int n = 0; n < order_L; ++n) sum += exp_order(n, N, theta);
      const int nxt = order_L % 2 == 0 ? order_L : order_L + 1;
      r.value = sign * pre * sum;
      r.error_estimate = pre * (std::abs(exp_order(nxt, N, theta)) + std::abs(sum) / N);
      break;
    }
    case Regime::turning: {
      const double y = edge_y(N, ax);
      const double pre = std::pow(2.0, 0.25) * std::pow(static_cast<double>(N), -1.0 / 12.0);
      TurningConstants c = opt.turning;
      if (order_L < 3) c.c20 = c.c21 = c.c22 = 0.0;
      if (order_L < 2) c.c10 = c.c11 = 0.0;
      r.value = sign * pre * turning_B(y, ax, c);
      const double h = std::pow(0.5 * ax, -2.0 * std::min(order_L, 3) / 3.0);
      r.error_estimate =
          pre * (h * (std::abs(airy(-y)) + std::abs(airy_prime(-y))) * (1.0 + std::pow(std::abs(y), 3.0)) + 1.0 / N);
      break;
    }
  }
  return r;
}

}  // namespace detproc::specfun

#pragma once

#include <optional>
#include <span>
#include <vector>

namespace detproc::specfun {

enum class Regime { oscillatory, exponential, turning };

const char* to_string(Regime r);

/// A truncated asymptotic expansion together with where it was evaluated.
struct AsymptoticResult {
  double value = 0.0;
  Regime regime = Regime::oscillatory;
  int order_L = 1;              // number of expansion orders kept
  double error_estimate = 0.0;  // magnitude of the first omitted contribution
};

// ---------------------------------------------------------------------------
// Airy asymptotic series
// ---------------------------------------------------------------------------

/// The six auxiliary series of the large-argument Airy expansions:
///   L(z) = Σ u_k z^{-k},           M(z) = Σ v_k z^{-k},
///   P(z) = Σ (-1)^k u_{2k} z^{-2k}, Q(z) = Σ (-1)^k u_{2k+1} z^{-2k-1},
///   R(z) = Σ (-1)^k v_{2k} z^{-2k}, S(z) = Σ (-1)^k v_{2k+1} z^{-2k-1},
/// with u_k = Γ(3k+1/2) / (54^k k! Γ(k+1/2)) and v_k = -(6k+1)/(6k-1) u_k.
enum class AirySeries { L, M, P, Q, R, S };

/// Largest number of terms accepted; u_k grows factorially.
inline constexpr int kMaxAirySeriesTerms = 150;

/// u_k and v_k.
double airy_u(int k);
double airy_v(int k);

/// Partial sum of the named series with `terms` terms. The usual
/// representation of Ai(x), x > 0, evaluates L and M at -ζ, so negative
/// arguments are accepted; z = 0 is a DomainError.
double airy_series(double z, AirySeries which, int terms);

/// Same series truncated just before its smallest term.
AsymptoticResult airy_series_optimal(double z, AirySeries which);

/// Ai(x) and Ai′(x) from the optimally truncated large-|x| expansions
/// (exponential regime for x > 0, oscillatory for x < 0). Only meaningful
/// for |x| ≳ 5; intended as an independent cross-check of `airy`.
AsymptoticResult airy_asymptotic(double x);
AsymptoticResult airy_prime_asymptotic(double x);

/// ρ_Ai(-x) ≈ (√x/π)[1 + sin(2ζ')/(4 x^{3/2})], ζ' = (2/3)x^{3/2} - π/4, x > 0.
/// The 1/4 comes from Q ≈ 5/(72ζ), S ≈ -7/(72ζ) with ζ = (2/3)x^{3/2}.
double airy_density_two_term(double x);

// ---------------------------------------------------------------------------
// Plancherel–Rotach coefficients
// ---------------------------------------------------------------------------

/// Coefficients of the polynomials φ_n(z) = Σ_m a_{nm} z^m and
/// ψ_{np}(z) = Σ_m b^{(p)}_{nm} z^m generated by
///   exp[z Σ_{m≥3} (-1)^m τ^{m-2}/m]                       = Σ_n φ_n(z) τ^n,
///   (Σ_{k≥1} τ^{k-1}/k)^p exp[z Σ_{m≥4} τ^{m-3}/m]        = Σ_n ψ_{np}(z) τ^n.
template <class T>
struct PRCoefficients {
  std::vector<std::vector<T>> a;               // a[n][m], 0 ≤ m ≤ n
  std::vector<std::vector<std::vector<T>>> b;  // b[p][n][m]

  const T& a_nm(int n, int m) const { return a.at(static_cast<std::size_t>(n)).at(static_cast<std::size_t>(m)); }
  const T& b_nm(int p, int n, int m) const {
    return b.at(static_cast<std::size_t>(p)).at(static_cast<std::size_t>(n)).at(static_cast<std::size_t>(m));
  }
};

namespace detail {

// Truncated power series in τ whose coefficients are polynomials in z.
template <class T>
using PolySeries = std::vector<std::vector<T>>;

// exp(z·s(τ)) for a scalar series s with s_0 = 0, to order max_n, using
// n e_n = z Σ_{k=1}^n k s_k e_{n-k}.
template <class T>
PolySeries<T> exp_z_series(const std::vector<T>& s, int max_n) {
  PolySeries<T> e(static_cast<std::size_t>(max_n) + 1);
  e[0] = {T(1)};
  for (int n = 1; n <= max_n; ++n) {
    std::vector<T> acc(static_cast<std::size_t>(n) + 1, T(0));
    for (int k = 1; k <= n; ++k) {
      const T coef = T(k) * s[static_cast<std::size_t>(k)];
      const auto& prev = e[static_cast<std::size_t>(n - k)];
      for (std::size_t m = 0; m < prev.size(); ++m) acc[m + 1] += coef * prev[m];
    }
    for (auto& c : acc) c /= T(n);
    e[static_cast<std::size_t>(n)] = std::move(acc);
  }
  return e;
}

}  // namespace detail

/// Builds a_{nm} for n ≤ max_n and b^{(p)}_{nm} for n ≤ max_n, p ≤ max_p,
/// by truncated formal power-series arithmetic over T. With T a rational
/// type the results are exact.
template <class T>
PRCoefficients<T> pr_coefficients(int max_n, int max_p) {
  PRCoefficients<T> out;
  const auto N = static_cast<std::size_t>(max_n);

  // s(τ) = Σ_{j≥1} (-1)^j τ^j / (j+2)
  std::vector<T> s(N + 1, T(0));
  for (std::size_t j = 1; j <= N; ++j) s[j] = T((j % 2 == 0) ? 1 : -1) / T(static_cast<long>(j) + 2);
  out.a = detail::exp_z_series(s, max_n);

  // r(τ) = Σ_{j≥1} τ^j / (j+3);  c(τ) = Σ_{j≥0} τ^j / (j+1)
  std::vector<T> r(N + 1, T(0)), c(N + 1, T(0));
  for (std::size_t j = 1; j <= N; ++j) r[j] = T(1) / T(static_cast<long>(j) + 3);
  for (std::size_t j = 0; j <= N; ++j) c[j] = T(1) / T(static_cast<long>(j) + 1);
  const auto er = detail::exp_z_series(r, max_n);

  std::vector<T> cp(N + 1, T(0));  // c(τ)^p, starting at p = 0
  cp[0] = T(1);
  for (int p = 0; p <= max_p; ++p) {
    if (p > 0) {
      std::vector<T> next(N + 1, T(0));
      for (std::size_t i = 0; i <= N; ++i)
        for (std::size_t j = 0; i + j <= N; ++j) next[i + j] += cp[i] * c[j];
      cp = std::move(next);
    }
    detail::PolySeries<T> psi(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
      std::vector<T> poly(n + 1, T(0));
      for (std::size_t i = 0; i <= n; ++i) {
        const auto& e = er[n - i];
        for (std::size_t m = 0; m < e.size(); ++m) poly[m] += cp[i] * e[m];
      }
      psi[n] = std::move(poly);
    }
    out.b.push_back(std::move(psi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plancherel–Rotach asymptotics of φ_N
// ---------------------------------------------------------------------------

/// Constants c_{nm} of the Airy-type turning-point correction B(y, x).
/// The leading term Ai(-y) needs none; the corrections are obtained by
/// least-squares fitting (see `fit_turning_constants`).
struct TurningConstants {
  double c10 = 0.0, c11 = 0.0;
  double c20 = 0.0, c21 = 0.0, c22 = 0.0;
};

/// B(y, x) = Ai(-y) + (x/2)^{-2/3}{c10 Ai′(-y) + c11 y² Ai(-y)}
///         + (x/2)^{-4/3}{c20 Ai′(-y) + c21 y² Ai(-y) + c22 y³ Ai′(-y)}.
double turning_B(double y, double x, const TurningConstants& c);

/// Least-squares fit of the five c_{nm} to recurrence values of φ_N on the
/// edge window x = √(2(N+1)) - y/(√2 N^{1/6}) for all (N, y) pairs given.
TurningConstants fit_turning_constants(std::span<const int> Ns, std::span<const double> ys);

/// Regime validity thresholds. With x = √(2(N+1)) cos θ (or cosh θ) the
/// oscillatory expansion is used when N sin³θ ≥ N^exponent and the
/// exponential one when N sinh³θ ≥ N^exponent; the turning-point form is
/// used when |y| ≤ N^turning_exponent. Anything else is ambiguous.
struct RegimeThresholds {
  double exponent = 0.3;
  double turning_exponent = 2.0 / 21.0;
};

struct PROptions {
  std::optional<Regime> force_regime;  // bypass selection (caller's choice)
  RegimeThresholds thresholds{};
  TurningConstants turning{};
};

/// Regime that `pr_hermite` would select for (N, x); throws
/// AmbiguousRegimeError when no region's hypotheses hold.
Regime select_regime(int N, double x, const RegimeThresholds& th = {});

/// Truncated Plancherel–Rotach expansion of φ_N(x), order_L ≥ 1 terms in n.
///   oscillatory: x = √(2(N+1)) cos θ,
///     φ_N ≈ (2/N)^{1/4} (π sin θ)^{-1/2} Σ_{n<L} Σ_m C¹_{nm} sin{(N+1)(2θ - sin 2θ)/2 + D¹_{nm}}
///   exponential: x = √(2(N+1)) cosh θ,
///     φ_N ≈ (1/(2N))^{1/4} (2π sinh θ)^{-1/2} e^{(N+1)(2θ - sinh 2θ)/2 - θ/2} Σ_{n<L} Σ_m C²_{nm}
///   turning: x = √(2(N+1)) - y/(√2 N^{1/6}),  φ_N ≈ 2^{1/4} N^{-1/12} B(y, x).
/// The Stirling-reduced prefactors carry a relative error O(1/N).
AsymptoticResult pr_hermite(int N, double x, int order_L, const PROptions& opt = {});

}  // namespace detproc::specfun

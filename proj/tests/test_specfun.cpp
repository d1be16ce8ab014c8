#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>

#include "detproc/error.hpp"
#include "detproc/quadrature.hpp"
#include "detproc/specfun/asymptotics.hpp"
#include "detproc/specfun/bessel.hpp"
#include "detproc/specfun/oscillator.hpp"
#include "detproc/specfun/transition.hpp"
#include "oracles/oracles.hpp"

using namespace detproc;
using namespace detproc::specfun;
constexpr double pi = std::numbers::pi;

static double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST_CASE("hermite_phi small values") {
  CHECK(hermite_phi(0, 0.0) == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-15));
  CHECK(hermite_phi(1, 0.0) == 0.0);
  CHECK(rel(hermite_phi(5, 1.3), oracle::hermite_phi(5, 1.3)) < 1e-12);
}

TEST_CASE("hermite_phi agrees with 50-digit evaluation") {
  for (int k : {0, 1, 2, 7, 20, 60, 150, 400}) {
    for (double x : {-3.1, -0.4, 0.0, 0.77, 2.5, 9.0, 25.0}) {
      const double ref = oracle::hermite_phi(k, x);
      const double got = hermite_phi(k, x);
      if (std::abs(ref) < 1e-280) continue;
      INFO("k=" << k << " x=" << x);
      CHECK(std::abs(got - ref) <= 1e-11 * std::abs(ref) + 1e-15);
    }
  }
}

TEST_CASE("hermite_phi has no overflow for large degree") {
  const double v = hermite_phi(10000, 150.0);
  CHECK(std::isfinite(v));
  CHECK(std::isfinite(hermite_phi(10000, 0.3)));
  CHECK(hermite_phi(5000, 200.0) == 0.0);
  CHECK_THROWS_AS(hermite_phi(kMaxOscillatorDegree + 1, 0.0), CapacityError);
  // φ_N(0) = (-1)^{N/2} π^{-1/4} √(N!)/(2^{N/2}(N/2)!)
  const int N = 2000;
  const double lg = 0.5 * std::lgamma(N + 1.0) - 0.5 * N * std::log(2.0) - std::lgamma(N / 2.0 + 1.0);
  CHECK(rel(hermite_phi(N, 0.0), std::pow(pi, -0.25) * std::exp(lg)) < 1e-10);
}

TEST_CASE("table matches pointwise evaluation") {
  auto t = hermite_phi_table(30, 1.7);
  for (int k = 0; k <= 30; ++k) CHECK(t[static_cast<std::size_t>(k)] == doctest::Approx(hermite_phi(k, 1.7)).epsilon(1e-14));
}

TEST_CASE("laguerre_phi") {
  CHECK(laguerre_phi(0, 0.0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(laguerre_phi(0, 1.0, 0.0) == 0.0);
  CHECK(rel(laguerre_phi(3, 0.5, 2.0), oracle::laguerre_phi(3, 0.5, 2.0)) < 1e-12);
  for (double nu : {-0.5, 0.0, 0.5, 2.0, 7.3})
    for (int k : {0, 1, 4, 15, 40})
      for (double x : {0.1, 1.0, 5.0, 33.0, 120.0}) {
        const double ref = oracle::laguerre_phi(k, nu, x);
        INFO("k=" << k << " nu=" << nu << " x=" << x);
        CHECK(std::abs(laguerre_phi(k, nu, x) - ref) <= 1e-10 * std::abs(ref) + 1e-14);
      }
  CHECK_THROWS_AS(laguerre_phi(1, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(laguerre_phi(1, 0.0, -1.0), DomainError);
}

TEST_CASE("OscillatorIndex validation") {
  CHECK_THROWS_AS((OscillatorIndex{-1, std::nullopt}.validate()), DomainError);
  CHECK_THROWS_AS((OscillatorIndex{1, -2.0}.validate()), DomainError);
  CHECK(OscillatorIndex{2, std::nullopt}(0.3) == doctest::Approx(hermite_phi(2, 0.3)));
  CHECK(OscillatorIndex{2, 1.5}(0.3) == doctest::Approx(laguerre_phi(2, 1.5, 0.3)));
}

TEST_CASE("orthonormality under Gauss quadrature") {
  const auto gh = quad::gauss_hermite_scaled(200);
  std::vector<std::vector<double>> tab;
  for (double x : gh.nodes) tab.push_back(hermite_phi_table(50, x));
  double worst = 0.0;
  for (int j = 0; j <= 50; ++j)
    for (int k = j; k <= 50; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < gh.size(); ++i) s += gh.weights[i] * tab[i][static_cast<std::size_t>(j)] * tab[i][static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(s - (j == k ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-8);

  for (double nu : {0.0, 0.5, 2.0}) {
    const auto gl = quad::gauss_laguerre_scaled(120, nu);
    std::vector<std::vector<double>> lt;
    for (double x : gl.nodes) lt.push_back(laguerre_phi_table(50, nu, x));
    double w2 = 0.0;
    for (int j = 0; j <= 50; ++j)
      for (int k = j; k <= 50; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < gl.size(); ++i) s += gl.weights[i] * lt[i][static_cast<std::size_t>(j)] * lt[i][static_cast<std::size_t>(k)];
        w2 = std::max(w2, std::abs(s - (j == k ? 1.0 : 0.0)));
      }
    INFO("nu=" << nu);
    CHECK(w2 < 1e-8);
  }
}

TEST_CASE("Gauss-Legendre and adaptive GK against exact integrals") {
  auto r = quad::gauss_legendre(20, 0.0, 2.0);
  CHECK(r.integrate([](double x) { return std::exp(x); }) == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
  auto res = quad::integrate([](double x) { return 1.0 / (1.0 + x * x); }, -30.0, 30.0);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(2.0 * std::atan(30.0)).epsilon(1e-12));
  auto inf = quad::integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0);
  CHECK(inf.value == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-11));
}

TEST_CASE("Airy function") {
  CHECK(rel(airy(0.0), std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0)) < 1e-14);
  CHECK(airy(10.0) > 0.0);
  CHECK(airy(10.0) < 1e-9);
  // oscillatory-integral oracle: Ai(x) = (1/π)∫_0^∞ cos(t³/3 + xt) dt, with
  // the contour rotated to t = s e^{iπ/6} so the integrand decays.
  for (double x : {-2.0, 0.5, 1.5}) {
    auto f = [x](double s) {
      const std::complex<double> w = std::polar(1.0, pi / 6);
      const auto t = s * w;
      return std::real(w * std::exp(std::complex<double>(0, 1) * (t * t * t / 3.0 + x * t)));
    };
    const double ref = oracle::ts(f, 0.0, 30.0) / pi;
    CHECK(airy(x) == doctest::Approx(ref).epsilon(1e-9));
  }
  // Ai'' = x Ai by central differences.
  const double h = 2e-4;
  for (double x = -10.0; x <= 10.0; x += 0.37) {
    const double d2 = (airy(x + h) - 2.0 * airy(x) + airy(x - h)) / (h * h);
    CHECK(std::abs(d2 - x * airy(x)) < 1e-6);
  }
  // envelope at -10
  CHECK(std::abs(airy(-10.0)) <= 1.0 / (std::sqrt(pi) * std::pow(10.0, 0.25)) * 1.01);
}

TEST_CASE("Airy asymptotic series") {
  for (double z : {3.0, 11.0}) {
    CHECK(airy_series(z, AirySeries::L, 2) == doctest::Approx(1.0 + 5.0 / (72.0 * z)).epsilon(1e-15));
    CHECK(airy_series(z, AirySeries::M, 2) == doctest::Approx(1.0 - 7.0 / (72.0 * z)).epsilon(1e-15));
    CHECK(airy_series(z, AirySeries::Q, 1) == doctest::Approx(5.0 / (72.0 * z)).epsilon(1e-15));
    CHECK(airy_series(z, AirySeries::S, 1) == doctest::Approx(-7.0 / (72.0 * z)).epsilon(1e-15));
  }
  CHECK(airy_u(1) == doctest::Approx(5.0 / 72.0));
  CHECK(airy_v(1) == doctest::Approx(-7.0 / 72.0));
  CHECK_THROWS_AS(airy_series(2.0, AirySeries::L, kMaxAirySeriesTerms + 1), CapacityError);
  CHECK_THROWS_AS(airy_series(0.0, AirySeries::L, 3), DomainError);

  for (double x : {-30.0, -12.0, -6.0, 6.0, 12.0}) {
    auto a = airy_asymptotic(x);
    auto d = airy_prime_asymptotic(x);
    INFO("x=" << x);
    CHECK(std::abs(a.value - boost::math::airy_ai(x)) <= 10 * a.error_estimate + 1e-14 * std::exp(-2.0 / 3.0 * std::pow(std::max(x, 0.0), 1.5)));
    CHECK(std::abs(a.value - boost::math::airy_ai(x)) <= 1e-9);
    CHECK(std::abs(d.value - boost::math::airy_ai_prime(x)) <= 10 * d.error_estimate + 1e-14);
  }
  // two-term density against Ai'² + x Ai² at -x
  for (double x : {20.0, 60.0}) {
    const double exact = std::pow(airy_prime(-x), 2) + x * std::pow(airy(-x), 2);
    CHECK(std::abs(airy_density_two_term(x) - exact) < 2.0 * std::sqrt(x) / pi / std::pow(x, 3.0));
  }
}

TEST_CASE("Bessel J and scaled I") {
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(bessel_j(1.0, 0.0) == 0.0);
  CHECK(rel(bessel_j(0.5, 2.0), std::sqrt(2.0 / (pi * 2.0)) * std::sin(2.0)) < 1e-13);
  CHECK_THROWS_AS(bessel_j(-1.0, 1.0), DomainError);
  for (double nu : {-0.5, 0.0, 0.5, 3.0, 10.0})
    for (double z : {0.01, 1.0, 7.0, 29.0, 31.0, 90.0, 400.0}) {
      const double ref = boost::math::cyl_bessel_i(nu, z) * std::exp(-z);
      INFO("nu=" << nu << " z=" << z);
      CHECK(rel(bessel_i_scaled(nu, z), ref) < 1e-12);
    }
  // J'_ν: recurrence J'_ν = (J_{ν-1} - J_{ν+1})/2
  CHECK(bessel_j_prime(2.5, 3.3) == doctest::Approx(0.5 * (bessel_j(1.5, 3.3) - bessel_j(3.5, 3.3))).epsilon(1e-12));
  CHECK(bessel_j_prime(1.0, 0.0) == 0.5);
}

TEST_CASE("PR coefficients in exact arithmetic") {
  using Q = boost::multiprecision::cpp_rational;
  auto c = pr_coefficients<Q>(3, 3);
  CHECK(c.a_nm(0, 0) == Q(1));
  CHECK(c.a_nm(1, 0) == Q(0));
  CHECK(c.a_nm(1, 1) == Q(-1, 3));
  CHECK(c.a_nm(2, 0) == Q(0));
  CHECK(c.a_nm(2, 1) == Q(1, 4));
  CHECK(c.a_nm(2, 2) == Q(1, 18));
  CHECK(c.a_nm(3, 0) == Q(0));
  CHECK(c.a_nm(3, 1) == Q(-1, 5));
  CHECK(c.a_nm(3, 2) == Q(-1, 12));
  CHECK(c.a_nm(3, 3) == Q(-1, 162));
  for (int p = 0; p <= 3; ++p) {
    CHECK(c.b_nm(p, 0, 0) == Q(1));
    CHECK(c.b_nm(p, 1, 0) == Q(p, 2));
    CHECK(c.b_nm(p, 1, 1) == Q(1, 4));
  }
  // double instantiation agrees
  auto d = pr_coefficients<double>(6, 2);
  auto e = pr_coefficients<Q>(6, 2);
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; m <= n; ++m) CHECK(d.a_nm(n, m) == doctest::Approx(static_cast<double>(e.a_nm(n, m))).epsilon(1e-15));
}

TEST_CASE("Plancherel-Rotach regimes") {
  const int N = 100;
  const double edge = std::sqrt(2.0 * (N + 1));
  auto a = pr_hermite(N, 0.0, 2);
  CHECK(a.regime == Regime::oscillatory);
  CHECK(rel(a.value, hermite_phi(N, 0.0)) < 2.0 / N);

  const double xe = edge * std::cosh(1.0);
  auto b = pr_hermite(N, xe, 2);
  CHECK(b.regime == Regime::exponential);
  CHECK(rel(b.value, hermite_phi(N, xe)) < 2.0 / N);
  CHECK(std::isfinite(b.error_estimate));

  // turning point, leading term only
  const double xt = edge - 1.0 / (std::sqrt(2.0) * std::pow(N, 1.0 / 6.0));
  auto c = pr_hermite(N, xt, 1);
  CHECK(c.regime == Regime::turning);
  const double scaled = hermite_phi(N, xt) / (std::pow(2.0, 0.25) * std::pow(N, -1.0 / 12.0));
  CHECK(std::abs(scaled - airy(-1.0)) < 3.0 * std::pow(N, -2.0 / 3.0));

  // odd symmetry
  CHECK(pr_hermite(101, -3.0, 3).value == doctest::Approx(-pr_hermite(101, 3.0, 3).value));

  // between the turning window and the oscillatory region
  const double gap_y = 2.0;
  const double xg = edge - gap_y / (std::sqrt(2.0) * std::pow(N, 1.0 / 6.0));
  CHECK_THROWS_AS(pr_hermite(N, xg, 2), AmbiguousRegimeError);
  PROptions forced;
  forced.force_regime = Regime::turning;
  CHECK(std::isfinite(pr_hermite(N, xg, 2, forced).value));
  CHECK_THROWS_AS(pr_hermite(5, 0.0, 1), DomainError);
}

TEST_CASE("Plancherel-Rotach error halves as N doubles") {
  // interior θ = π/3
  double prev = 0.0;
  for (int N : {100, 200, 400}) {
    const double x = std::sqrt(2.0 * (N + 1)) * std::cos(pi / 3);
    // envelope-normalised error averaged over a small θ window
    double num = 0.0, den = 0.0;
    for (int i = -50; i <= 50; ++i) {
      const double th = pi / 3 + 0.002 * i;
      const double xi = std::sqrt(2.0 * (N + 1)) * std::cos(th);
      const double ex = hermite_phi(N, xi);
      const double ap = pr_hermite(N, xi, 3).value;
      num += (ap - ex) * (ap - ex);
      den += ex * ex;
    }
    (void)x;
    const double err = std::sqrt(num / den);
    if (prev > 0.0) {
      INFO("N=" << N << " ratio=" << err / prev);
      CHECK(err / prev > 0.3);
      CHECK(err / prev < 0.7);
    }
    prev = err;
  }
}

TEST_CASE("turning constants fit improves the edge approximation") {
  std::vector<int> Ns = {200, 400, 800, 1600};
  std::vector<double> ys;
  for (double y = -1.0; y <= 1.0; y += 0.1) ys.push_back(y);
  auto c = fit_turning_constants(Ns, ys);
  const int N = 1000;
  double e0 = 0.0, e1 = 0.0;
  for (double y : ys) {
    const double x = std::sqrt(2.0 * (N + 1)) - y / (std::sqrt(2.0) * std::pow(N, 1.0 / 6.0));
    const double s = hermite_phi(N, x) / (std::pow(2.0, 0.25) * std::pow(N, -1.0 / 12.0));
    e0 = std::max(e0, std::abs(s - airy(-y)));
    e1 = std::max(e1, std::abs(s - turning_B(y, x, c)));
  }
  CHECK(e1 < 0.5 * e0);
}

TEST_CASE("heat kernel") {
  CHECK(heat_kernel_psin(1.0, 0.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * pi)));
  CHECK(heat_kernel_psin(0.7, 0.3, -1.1) == heat_kernel_psin(0.7, -1.1, 0.3));
  CHECK_THROWS_AS(heat_kernel_psin(0.0, 1.0, 0.0), DistributionalBranchError);
  CHECK(std::holds_alternative<DeltaMass>(heat_transition(0.0, 1.0, 0.0)));
  // complex argument: p(t, iu | y) = p(t, y|iu) analytic continuation
  const cplx v = heat_kernel_psin(1.3, cplx(0.0, 0.8), cplx(0.4, 0.0));
  const cplx d = cplx(-0.4, 0.8);
  CHECK(std::abs(v - std::exp(-d * d / 2.6) / std::sqrt(2.0 * pi * 1.3)) < 1e-15);
  // Chapman–Kolmogorov by Gauss–Hermite
  const double s = 0.4, t = 0.9, x = 0.3, y = -0.5;
  const auto gh = quad::gauss_hermite_scaled(80);
  const double sc = 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < gh.size(); ++i) {
    const double z = sc * gh.nodes[i];
    sum += sc * gh.weights[i] * heat_kernel_psin(s, x, z) * heat_kernel_psin(t, z, y);
  }
  CHECK(std::abs(sum - heat_kernel_psin(s + t, x, y)) < 1e-8);
}

TEST_CASE("squared Bessel transition") {
  for (double nu : {-0.5, 0.0, 1.5}) {
    const double t = 0.8;
    const double y = 1.7;
    CHECK(bessel_transition(nu, t, 0.0, y) ==
          doctest::Approx(std::pow(y, nu) / (std::pow(2 * t, nu + 1) * std::tgamma(nu + 1)) * std::exp(-y / (2 * t))));
    // against Boost I_ν
    const double x = 2.2;
    const double ref = 1.0 / (2 * t) * std::pow(y / x, nu / 2) * std::exp(-(x + y) / (2 * t)) *
                       boost::math::cyl_bessel_i(nu, std::sqrt(x * y) / t);
    CHECK(rel(bessel_transition(nu, t, x, y), ref) < 1e-12);
    // normalisation
    const double norm = oracle::ts([&](double yy) { return bessel_transition(nu, t, x, yy); }, 0.0, INFINITY, 1e-10);
    INFO("nu=" << nu);
    CHECK(std::abs(norm - 1.0) < 1e-8);
    // Chapman–Kolmogorov
    const double s = 0.5, y2 = 3.1;
    const double ck = oracle::ts([&](double z) { return bessel_transition(nu, s, x, z) * bessel_transition(nu, t, z, y2); },
                                 0.0, INFINITY, 1e-10);
    CHECK(std::abs(ck - bessel_transition(nu, s + t, x, y2)) < 1e-6);
  }
  CHECK_THROWS_AS(bessel_transition(0.0, 0.0, 1.0, 2.0), DistributionalBranchError);
  CHECK(std::holds_alternative<DeltaMass>(bessel_transition_tagged(0.0, 0.0, 1.0, 2.0)));
}

TEST_CASE("continued backward Bessel kernel: mass and mean") {
  for (double nu : {-0.5, 0.0, 2.0}) {
    for (double y : {0.0, 0.6, 3.0}) {
      const double t = 0.7;
      // u = -r² removes the |u|^ν endpoint singularity
      auto f = [&](double r) { return 2.0 * r * bessel_backward_continued(nu, t, -r * r, y); };
      const double mass = oracle::gk(f, 0.0, 20.0, 1e-13);
      const double mean = oracle::gk([&](double r) { return -r * r * f(r); }, 0.0, 20.0, 1e-13);
      INFO("nu=" << nu << " y=" << y);
      CHECK(std::abs(mass - 1.0) < 1e-7);
      CHECK(std::abs(mean - (y - 2.0 * (nu + 1.0) * t)) < 1e-6);
    }
  }
}

TEST_CASE("drift kernel q") {
  const double t = 1.3, d = 0.4;
  CHECK(drift_kernel_q(0.0, t, d) == doctest::Approx(heat_kernel_psin(t, d - t * t / 4, 0.0)).epsilon(1e-14));
  const double s = 0.5;
  const double tot = oracle::ts([&](double dd) { return drift_kernel_q(s, t, dd); }, -INFINITY, INFINITY);
  CHECK(std::abs(tot - 1.0) < 1e-10);
  const double peak = (t - s) * (t + s) / 4;
  CHECK(drift_kernel_q(s, t, peak) > drift_kernel_q(s, t, peak + 1e-3));
  CHECK(drift_kernel_q(s, t, peak) > drift_kernel_q(s, t, peak - 1e-3));
  CHECK(std::abs(drift_kernel_q(s, t, cplx(d, 0.0)) - drift_kernel_q(s, t, d)) < 1e-15);
  CHECK_THROWS_AS(drift_kernel_q(1.0, 1.0, 0.0), DistributionalBranchError);
}

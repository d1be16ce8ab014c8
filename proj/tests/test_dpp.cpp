#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "detproc/configspace/configspace.hpp"
#include "detproc/dpp/dpp.hpp"
#include "detproc/error.hpp"
#include "detproc/kernels/classical.hpp"
#include "detproc/kernels/finite.hpp"
#include "oracles/oracles.hpp"

using namespace detproc;
using namespace detproc::dpp;
constexpr double pi = std::numbers::pi;

namespace {

const StaticKernel sine = [](double x, double y) { return kernels::sine_kernel(x, y); };

// rank-n projection onto normalized Legendre polynomials on [-1, 1]
StaticKernel legendre_projection(int n) {
  return [n](double x, double y) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += (k + 0.5) * std::legendre(k, x) * std::legendre(k, y);
    return s;
  };
}

const SpectralDecomposition& sine05() {
  static const auto sd = decompose(nystrom(sine, {{0.0, 5.0}}, 48));
  return sd;
}

const std::vector<Configuration>& sine_samples() {
  static const auto s = sample_many(sine05(), 10000, 20240611);
  return s;
}

}  // namespace

TEST_CASE("nystrom basics") {
  const auto op = nystrom(sine, {{0.0, 1.0}}, 64);
  CHECK(op.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((op.kmat - op.kmat.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const double d32 = fredholm_det(nystrom(sine, {{0.0, 2.0}}, 32), 1.0);
  const double d64 = fredholm_det(nystrom(sine, {{0.0, 2.0}}, 64), 1.0);
  CHECK(std::abs(d32 - d64) < 1e-8);

  const auto empty = nystrom(sine, {{1.0, 1.0}}, 16);
  CHECK(empty.size() == 0);
  CHECK(fredholm_det(empty, 1.0) == 1.0);
  CHECK_THROWS_AS(nystrom(sine, {{0.0, INFINITY}}, 16), DomainError);
  CHECK_THROWS_AS(nystrom(sine, {{0.0, 1.0}}, 3), ParameterError);

  StaticKernel bad = [](double x, double) -> double {
    if (x > 0.5) throw NumericalError("boom");
    return 0.0;
  };
  try {
    nystrom(bad, {{0.0, 1.0}}, 8);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.kind() == "numerical");
    CHECK(std::string(e.what()).find("at kernel node") != std::string::npos);
  }
}

TEST_CASE("fredholm determinant") {
  const auto op = nystrom(sine, {{0.0, 0.1}}, 16);
  CHECK(fredholm_det(op, 0.0) == 1.0);
  const double r = fredholm_det(op, 1.0) - 0.9;
  CHECK(std::abs(r) <= 0.01);
  // trace series to second order
  const Eigen::MatrixXd S = op.symmetric_form();
  const double t1 = S.trace(), t2 = (S * S).trace();
  CHECK(std::abs(fredholm_det(op, 1.0) - (1 - t1 + 0.5 * (t1 * t1 - t2))) < 1e-5);

  auto g = [](double x) { return std::exp(-x * x); };
  const auto r1 = nystrom([&](double x, double y) { return g(x) * g(y); }, {{-3.0, 3.0}}, 40);
  const double n2 = std::sqrt(pi / 2) * std::erf(3 * std::sqrt(2.0));
  for (double z : {0.3, 1.0, -2.0}) CHECK(fredholm_det(r1, z) == doctest::Approx(1 - z * n2).epsilon(1e-10));

  // gap probabilities shrink as the interval grows
  double prev = 1.0;
  for (double L : {0.2, 0.5, 1.0, 1.5, 2.5}) {
    const double d = fredholm_det(nystrom(sine, {{0.0, L}}, 40), 1.0);
    CHECK(d <= prev);
    CHECK(d >= 0.0);
    prev = d;
  }
  // a union of intervals: far-apart pieces nearly factorize
  const double a = fredholm_det(nystrom(sine, {{0.0, 0.7}}, 30), 1.0);
  const double ab = fredholm_det(nystrom(sine, {{0.0, 0.7}, {40.0, 40.7}}, 30), 1.0);
  CHECK(std::abs(ab - a * a) < 1e-3);
}

TEST_CASE("spectra of discretized kernels lie in [0, 1]") {
  std::vector<std::pair<std::string, DiscretizedOperator>> ops;
  ops.emplace_back("sine", nystrom(sine, {{-3.0, 4.0}}, 50));
  ops.emplace_back("airy", nystrom([](double x, double y) { return kernels::airy_kernel(x, y); }, {{-6.0, 4.0}}, 50));
  ops.emplace_back("bessel", nystrom([](double x, double y) { return kernels::bessel_kernel(0.5, x, y); }, {{0.0, 8.0}}, 50));
  ops.emplace_back("hermite", nystrom([](double x, double y) { return kernels::finite_hermite_kernel(6, 1.0, x, 1.0, y); },
                                      {{-8.0, 8.0}}, 60));
  for (const auto& [name, op] : ops) {
    INFO(name);
    const auto lam = operator_spectrum(op);
    CHECK(lam.minCoeff() >= -1e-8);
    CHECK(lam.maxCoeff() <= 1 + 1e-8);
    const double d = fredholm_det(op, 1.0);
    CHECK(d >= -1e-12);
    CHECK(d <= 1.0);
  }
  CHECK_THROWS_AS(decompose(nystrom([](double, double) { return 2.0; }, {{0.0, 1.0}}, 8)), NumericalError);
}

TEST_CASE("correlation functions") {
  const std::vector<double> one = {0.3};
  CHECK(correlation_fn(sine, one) == 1.0);
  const std::vector<double> two = {0.0, 1.0};
  CHECK(correlation_fn(sine, two) == doctest::Approx(1.0).epsilon(1e-15));
  double prev = 1.0;
  for (double d : {0.5, 0.1, 0.01, 1e-4}) {
    const std::vector<double> p = {0.2, 0.2 + d};
    const double r = correlation_fn(sine, p);
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("multitime fredholm") {
  auto K1 = [](double s, double x, double t, double y) { return kernels::finite_hermite_kernel(1, s, x, t, y); };
  // χ ≡ 0
  std::vector<TimeSlice> zero = {{0.5, {{-1.0, 1.0}}, [](double) { return 0.0; }},
                                 {1.0, {{-1.0, 1.0}}, [](double) { return 0.0; }}};
  CHECK(multitime_fredholm(K1, zero, 16).value == 1.0);

  // one time reduces to fredholm_det
  auto K5 = [](double s, double x, double t, double y) { return kernels::finite_hermite_kernel(5, s, x, t, y); };
  const double z = 0.7;
  std::vector<TimeSlice> single = {{1.3, {{-1.0, 2.0}}, [z](double) { return -z; }}};
  const auto op = nystrom([](double x, double y) { return kernels::finite_hermite_kernel(5, 1.3, x, 1.3, y); },
                          {{-1.0, 2.0}}, 24);
  CHECK(std::abs(multitime_fredholm(K5, single, 24).value - fredholm_det(op, z)) < 1e-10);

  // one Brownian particle at two times against a direct Gaussian computation
  const double s = 0.5, t = 1.2, th1 = 0.4, th2 = -0.8;
  auto chi1 = [&](double x) { return (x > -0.3 && x < 0.6) ? std::expm1(th1) : 0.0; };
  auto chi2 = [&](double y) { return (y > 0.1 && y < 1.5) ? std::expm1(th2) : 0.0; };
  std::vector<TimeSlice> two = {{s, {{-0.3, 0.6}}, chi1}, {t, {{0.1, 1.5}}, chi2}};
  const auto mt = multitime_fredholm(K1, two, 40);
  auto p = [](double tt, double a, double b) { return std::exp(-(a - b) * (a - b) / (2 * tt)) / std::sqrt(2 * pi * tt); };
  const double e1 = oracle::gk([&](double x) { return p(s, x, 0) * chi1(x); }, -0.3, 0.6);
  const double e2 = oracle::gk([&](double y) { return p(t, y, 0) * chi2(y); }, 0.1, 1.5);
  const double e12 = oracle::gk(
      [&](double x) {
        return p(s, x, 0) * chi1(x) * oracle::gk([&](double y) { return p(t - s, y, x) * chi2(y); }, 0.1, 1.5);
      },
      -0.3, 0.6);
  CHECK(mt.value == doctest::Approx(1 + e1 + e2 + e12).epsilon(1e-10));
  CHECK_FALSE(mt.warning);
  std::vector<TimeSlice> bad = {two[1], two[0]};
  CHECK_THROWS_AS(multitime_fredholm(K1, bad, 8), ParameterError);
}

TEST_CASE("sampler: degenerate spectra") {
  SplitMix64 rng(1);
  SpectralDecomposition none = sine05();
  none.eigenvalues.setZero();
  CHECK(sample(none, rng).empty());

  const auto proj = decompose(nystrom(legendre_projection(4), {{-1.0, 1.0}}, 12));
  for (int r = 0; r < 200; ++r) {
    const auto c = sample(proj, rng);
    CHECK(c.total_mass() == 4);
    CHECK(c.count_in(-1.0, 1.0) == 4);
  }
  std::vector<Configuration> det;
  for (int r = 0; r < 50; ++r) det.push_back(sample(proj, rng));
  const auto m = moment_diagnostic(det, {-1.0, 1.0}, 4.0, 2);
  CHECK(m.empirical == 0.0);
  CHECK(m.bound == 144.0);
}

TEST_CASE("sampler: sine kernel on [0,5] counts and moments") {
  const auto& S = sine_samples();
  double mean = 0.0, m2 = 0.0;
  for (const auto& c : S) {
    mean += static_cast<double>(c.total_mass());
    m2 += static_cast<double>(c.total_mass() * c.total_mass());
  }
  mean /= S.size();
  const double sd = std::sqrt((m2 / S.size() - mean * mean) / S.size());
  CHECK(std::abs(mean - 5.0) <= 3 * sd);
  // number variance equals Σλ(1-λ)
  const auto& lam = sine05().eigenvalues;
  const double var_pred = (lam.array() * (1 - lam.array())).sum();
  CHECK(std::abs((m2 / S.size() - mean * mean) - var_pred) < 0.05);

  for (int k : {1, 2}) {
    const auto m = moment_diagnostic(S, {0.0, 5.0}, 5.0, k);
    CHECK(m.empirical <= m.bound + 3 * m.std_error);
  }
}

TEST_CASE("sampler: one-point density passes a chi-square test") {
  const auto& S = sine_samples();
  const int B = 10;
  std::vector<double> counts(B, 0.0);
  for (const auto& c : S)
    for (double x : c.points()) counts[std::min(B - 1, static_cast<int>(x / 0.5))] += 1;
  const double expected = 0.5 * static_cast<double>(S.size());
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double pval = boost::math::cdf(boost::math::complement(boost::math::chi_squared(B - 1), chi2));
  CHECK(pval > 0.001);
}

TEST_CASE("sampler: pair correlation on a coarse grid") {
  const auto& S = sine_samples();
  const int B = 5;  // unit bins on [0,5]
  for (int a = 0; a < B; ++a)
    for (int b = a; b < B; ++b) {
      // ordered pairs of distinct points with x in bin a, y in bin b
      double s = 0.0, s2 = 0.0;
      for (const auto& c : S) {
        const auto pts = c.points();
        double n = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t j = 0; j < pts.size(); ++j)
            if (i != j && static_cast<int>(pts[i]) == a && static_cast<int>(pts[j]) == b) n += 1;
        s += n;
        s2 += n * n;
      }
      const double N = static_cast<double>(S.size());
      const double emp = s / N, se = std::sqrt((s2 / N - emp * emp) / N);
      const double exact = oracle::gk(
          [&](double x) {
            return oracle::gk([&](double y) { return 1 - std::pow(kernels::sine_kernel(x, y), 2); }, b, b + 1.0, 1e-10);
          },
          a, a + 1.0, 1e-9);
      INFO("bins " << a << "," << b);
      CHECK(std::abs(emp - exact) <= 3 * se);
    }
}

TEST_CASE("sampler: determinism and thread independence") {
  const auto a = sample_many(sine05(), 64, 99, 1);
  const auto b = sample_many(sine05(), 64, 99, 4);
  CHECK(a == b);
  const auto c = sample_many(sine05(), 64, 100, 4);
  CHECK_FALSE(a == c);
}

TEST_CASE("sine-kernel samples on [-50,50] satisfy the lattice occupation bound") {
  Domain D;
  for (int k = -5; k < 5; ++k) D.push_back({10.0 * k, 10.0 * (k + 1)});
  const auto sd = decompose(nystrom(sine, D, 40));
  const auto S = sample_many(sd, 100, 7);
  int ok = 0;
  const std::vector<double> kap = {0.75};
  const std::vector<long> ms = {4};
  for (const auto& c : S) ok += configspace::check_conditions(c, kap, ms, configspace::Mode::Y).CII.at({0.75, 4});
  CHECK(ok >= 99);
}

TEST_CASE("tail field diagnostic") {
  // quantiles of ρ = 1 on [-10, 10]
  std::vector<double> q;
  for (int j = 0; j < 20; ++j) q.push_back(-9.5 + j);
  const auto xi = Configuration::from_points(q);
  const std::vector<double> L = {0.5, 1.0, 3.0, 7.25, 9.9};
  const auto rows = tail_field_diagnostic(xi, [](double) { return 1.0; }, {-10.0, 10.0}, L);
  for (const auto& r : rows) {
    CHECK(r.count_deviation <= 1.0);
    CHECK(std::abs(r.tail_field) < 1e-12);
  }

  // GUE slice: count fluctuations grow slower than L
  const int N = 20;
  const auto sd = decompose(nystrom([](double x, double y) { return kernels::finite_hermite_kernel(N, 1.0, x, 1.0, y); },
                                    {{-12.0, 12.0}}, 120));
  const auto S = sample_many(sd, 1000, 5);
  const std::vector<double> Lg = {0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> dev(Lg.size(), 0.0);
  for (const auto& c : S) {
    const auto r = tail_field_diagnostic(c, [](double x) { return kernels::gue_density(N, 1.0, x); }, {-12.0, 12.0}, Lg);
    for (std::size_t i = 0; i < Lg.size(); ++i) dev[i] += r[i].count_deviation / S.size();
  }
  CHECK(fit_exponent(Lg, dev) < 1.0);
}

TEST_CASE("sample and fredholm file formats") {
  const std::vector<Configuration> S = {Configuration::from_points({0.5, 1.25}), Configuration{},
                                        Configuration::from_points({0.1 + 0.2})};
  std::ostringstream os;
  write_samples(os, {{"kernel", "sine"}, {"seed", 3}, {"n_nodes", 48}}, S);
  std::istringstream is(os.str());
  nlohmann::json meta;
  const auto back = read_samples(is, &meta);
  CHECK(meta["seed"] == 3);
  CHECK(back == S);

  std::ostringstream f;
  write_fredholm_header(f);
  write_fredholm_row(f, 0.0, 0.5, 32, 1.0, 0.123456789012345678);
  CHECK(f.str() == "domain_lo,domain_hi,n_nodes,z,det\n0.0000000000000000e+00,5.0000000000000000e-01,32,1.0000000000000000e+00,"
              "1.2345678901234568e-01\n");
}

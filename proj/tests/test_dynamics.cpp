#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "detproc/dpp/dpp.hpp"
#include "detproc/dynamics/dynamics.hpp"
#include "detproc/error.hpp"
#include "detproc/kernels/classical.hpp"
#include "detproc/kernels/finite.hpp"
#include "detproc/specfun/transition.hpp"
#include "oracles/oracles.hpp"

using namespace detproc;
using namespace detproc::dynamics;
constexpr double pi = std::numbers::pi;

namespace {

SimParams params(int R, std::uint64_t seed, double dt = 1e-3) {
  SimParams p;
  p.replicas = R;
  p.seed = seed;
  p.dt_max = dt;
  p.threads = 1;
  return p;
}

// L1 distance between the histogram (normalized to a probability density) and
// the bin-averaged density f/mass, plus the exact and empirical mass outside.
template <class F>
double l1_distance(const Histogram& h, F f, double mass) {
  double d = 0.0, inside = 0.0;
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
    const double a = h.edges[b], c = h.edges[b + 1];
    const double exact = oracle::gk([&](double x) { return f(x) / mass; }, a, c, 1e-10);
    d += std::abs(h.density[b] / mass * (c - a) - exact);
    inside += exact;
  }
  return d + std::abs(1 - inside) + h.outside / mass;
}

double sample_mean(const PathEnsemble& e, std::size_t ti, int j, double* se, int power = 1) {
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < e.replicas; ++r) {
    const double v = std::pow(e.at(r, ti, j), power);
    s += v;
    s2 += v * v;
  }
  const double m = s / e.replicas;
  *se = std::sqrt((s2 / e.replicas - m * m) / e.replicas);
  return m;
}

}  // namespace

TEST_CASE("dyson: single particle is Brownian motion") {
  const std::vector<double> grid = {0.0, 0.5, 1.5};
  const auto e = simulate_dyson(1, Origin{}, grid, params(20000, 11, 0.01));
  for (std::size_t ti = 1; ti < grid.size(); ++ti) {
    double se;
    const double v = sample_mean(e, ti, 0, &se, 2);
    CHECK(std::abs(v - grid[ti]) <= 3 * se);
  }
  const auto h = empirical_density(e, 1.5, 24, -6.0, 6.0);
  CHECK(l1_distance(h, [](double x) { return std::exp(-x * x / 3.0) / std::sqrt(3.0 * pi); }, 1.0) < 0.05);
}

TEST_CASE("dyson: ordering and input validation") {
  const std::vector<double> grid = {0.0, 0.25, 0.5, 1.0};
  const auto e = simulate_dyson(2, std::vector<double>{-0.05, 0.05}, grid, params(500, 3));
  CHECK(e.violations() == 0);
  for (int r = 0; r < e.replicas; ++r)
    for (std::size_t ti = 0; ti < grid.size(); ++ti) CHECK(e.at(r, ti, 0) < e.at(r, ti, 1));

  const std::vector<double> g = {0.0, 1.0};
  CHECK_THROWS_AS(simulate_dyson(2, std::vector<double>{0.3, 0.3}, g, params(1, 0)), DomainError);
  CHECK_THROWS_AS(simulate_dyson(2, std::vector<double>{0.3}, g, params(1, 0)), ParameterError);
  CHECK_THROWS_AS(simulate_dyson(2, Origin{}, g, params(1, 0, 0.0)), ParameterError);
  const std::vector<double> bad = {0.1, 1.0};
  CHECK_THROWS_AS(simulate_dyson(2, Origin{}, bad, params(1, 0)), ParameterError);
  const std::vector<double> dec = {0.0, 1.0, 0.5};
  CHECK_THROWS_AS(simulate_dyson(2, Origin{}, dec, params(1, 0)), ParameterError);
}

TEST_CASE("dyson: origin start matches the GUE density") {
  const int N = 10;
  const double t = 2.0 * N / (pi * pi);
  const std::vector<double> grid = {0.0, 0.1, t};
  const auto e = simulate_dyson(N, Origin{}, grid, params(1000, 2024, 2e-3));
  CHECK(e.violations() == 0);
  const double edge = 2 * std::sqrt(t * N) + 3;
  const auto h = empirical_density(e, t, 20, -edge, edge);
  CHECK(l1_distance(h, [&](double x) { return kernels::gue_density(N, t, x); }, N) < 0.05);
  // the exact matrix draw at the first grid time
  const auto h0 = empirical_density(e, 0.1, 20, -3.0, 3.0);
  CHECK(l1_distance(h0, [&](double x) { return kernels::gue_density(N, 0.1, x); }, N) < 0.05);
}

TEST_CASE("dyson: soft-edge window approaches the Airy density") {
  // At time N^{1/3} the origin-started process, shifted by the soft-edge map,
  // is the t = 0 state of the drifted process with the semicircle-edge profile.
  auto l1 = [](int N, int R) {
    const auto at = scaling_map({0.0, 0.0}, ScalingMap::soft_edge, N);
    const std::vector<double> grid = {0.0, 0.8 * at.t, at.t};
    auto e = simulate_dyson(N, Origin{}, grid, params(R, 77, 2e-3));
    for (auto& x : e.positions) x -= at.x;
    const auto h = empirical_density(e, at.t, 8, -5.0, 3.0);
    double d = 0.0;
    for (int b = 0; b < 8; ++b) {
      const double exact = oracle::gk([](double x) { return kernels::airy_density(x); }, h.edges[b], h.edges[b + 1]);
      d += std::abs(h.density[b] * 1.0 - exact);
    }
    return d;
  };
  const double d10 = l1(10, 3000), d30 = l1(30, 3000);
  INFO("L1 at N=10: " << d10 << ", N=30: " << d30);
  CHECK(d30 < d10);
}

TEST_CASE("besq: mean, positivity, ordering") {
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  const auto e = simulate_besq(1, 0.0, std::vector<double>{1.0}, grid, params(20000, 5));
  double se;
  const double m = sample_mean(e, 2, 0, &se);
  CHECK(std::abs(m - 3.0) <= 3 * se);

  const auto e5 = simulate_besq(5, 0.5, std::vector<double>{0.2, 1.0, 2.0, 3.5, 5.0}, grid, params(300, 9));
  CHECK(e5.violations() == 0);
  CHECK(*std::min_element(e5.positions.begin(), e5.positions.end()) >= 0.0);
  CHECK_THROWS_AS(simulate_besq(1, -1.0, Origin{}, grid, params(1, 0)), DomainError);
  CHECK_THROWS_AS(simulate_besq(1, 0.0, std::vector<double>{-0.1}, grid, params(1, 0)), DomainError);
}

TEST_CASE("besq: single-particle marginal matches the transition density") {
  const std::vector<double> grid = {0.0, 1.0};
  for (double nu : {0.0, 1.5, -0.5}) {
    INFO("nu = " << nu);
    const auto e = simulate_besq(1, nu, std::vector<double>{1.0}, grid, params(40000, 31));
    CHECK(e.violations() == 0);
    const auto h = empirical_density(e, 1.0, 30, 0.0, 30.0);
    CHECK(l1_distance(h, [nu](double y) { return y > 0 ? specfun::bessel_transition(nu, 1.0, 1.0, y) : 0.0; }, 1.0) <
          0.05);
  }
}

TEST_CASE("besq: chiral origin start matches the Laguerre density") {
  const int N = 3;
  const double nu = 1.0;
  const std::vector<double> grid = {0.0, 0.3, 0.6};
  const auto e = simulate_besq(N, nu, Origin{}, grid, params(2000, 17));
  CHECK(e.violations() == 0);
  for (double t : {0.3, 0.6}) {
    INFO("t = " << t);
    const auto h = empirical_density(e, t, 20, 0.0, 40.0 * t);
    CHECK(l1_distance(h, [&](double x) { return kernels::finite_laguerre_kernel(N, nu, t, x, t, x); }, N) < 0.05);
  }
  // non-integer index starts from a small spread
  const auto s = simulate_besq(2, 0.5, Origin{}, grid, params(2, 1));
  CHECK(s.at(0, 0, 0) == 1e-6);
  CHECK(s.at(0, 0, 1) == 2e-6);
}

TEST_CASE("drifted process") {
  const int N = 27;
  const auto sc = kernels::semicircle_drift(N);
  const double lower = -4 * std::pow(N, 2.0 / 3.0);
  const double inv = -oracle::ts([&](double r) { return 2 * kernels::semicircle_edge(N, -r * r) / r; }, 0.0,
                                 std::sqrt(-lower));
  CHECK(sc.inv_moment == doctest::Approx(inv).epsilon(1e-10));
  CHECK(sc.inv_moment == doctest::Approx(-3.0).epsilon(1e-14));

  const std::vector<double> grid = {0.0, 0.4, 1.0};
  const std::vector<double> x0 = {-1.0, 0.0, 2.0};
  const auto d = simulate_drifted(3, x0, grid, params(50, 8), sc);
  const auto x = simulate_dyson(3, x0, grid, params(50, 8));
  CHECK(d.model == Model::drifted);
  for (int r = 0; r < 50; ++r)
    for (std::size_t ti = 0; ti < grid.size(); ++ti)
      for (int j = 0; j < 3; ++j) {
        const double t = grid[ti];
        if (ti == 0) CHECK(d.at(r, ti, j) == x.at(r, ti, j));
        CHECK(d.at(r, ti, j) - t * t / 4 + 3.0 * t == doctest::Approx(x.at(r, ti, j)).epsilon(1e-12));
      }
  // N = 1: what is left after removing the shift is Brownian
  const auto one = simulate_drifted(1, std::vector<double>{0.0}, grid, params(20000, 4, 0.05), kernels::semicircle_drift(1));
  double s = 0, s2 = 0;
  for (int r = 0; r < one.replicas; ++r) {
    const double b = one.at(r, 2, 0) - 0.25 + 1.0;
    s += b;
    s2 += b * b;
  }
  const double m = s / one.replicas, v = s2 / one.replicas - m * m;
  CHECK(std::abs(m) < 3 * std::sqrt(1.0 / one.replicas));
  CHECK(std::abs(v - 1.0) < 3 * std::sqrt(2.0 / one.replicas));
}

TEST_CASE("determinism, threads and relabelling") {
  const std::vector<double> grid = {0.0, 0.3, 0.9};
  auto p1 = params(40, 123);
  auto p4 = p1;
  p4.threads = 4;
  const auto a = simulate_dyson(4, std::vector<double>{-1.0, 0.0, 0.5, 2.0}, grid, p1);
  const auto b = simulate_dyson(4, std::vector<double>{-1.0, 0.0, 0.5, 2.0}, grid, p4);
  const auto c = simulate_dyson(4, std::vector<double>{2.0, 0.5, -1.0, 0.0}, grid, p1);
  CHECK(a == b);
  CHECK(a == c);
  auto p2 = p1;
  p2.seed = 124;
  CHECK_FALSE(a == simulate_dyson(4, std::vector<double>{-1.0, 0.0, 0.5, 2.0}, grid, p2));
  CHECK(simulate_besq(3, 2.0, Origin{}, grid, p1) == simulate_besq(3, 2.0, Origin{}, grid, p4));

  // two chunks of 20 replicas reproduce the 40-replica run
  auto h1 = p1, h2 = p1;
  h1.replicas = h2.replicas = 20;
  h2.first_replica = 20;
  const auto A = simulate_dyson(4, Origin{}, grid, h1), B = simulate_dyson(4, Origin{}, grid, h2);
  const auto whole = simulate_dyson(4, Origin{}, grid, p1);
  std::vector<double> joined = A.positions;
  joined.insert(joined.end(), B.positions.begin(), B.positions.end());
  CHECK(joined == whole.positions);
}

TEST_CASE("empirical density") {
  const std::vector<double> grid = {0.0, 0.7};
  const auto e = simulate_dyson(6, Origin{}, grid, params(200, 1));
  const auto h = empirical_density(e, 0.7, 17);
  double mass = 0.0;
  for (std::size_t b = 0; b < h.density.size(); ++b) mass += h.density[b] * (h.edges[b + 1] - h.edges[b]);
  CHECK(mass == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(h.outside == 0.0);
  for (double s : h.std_error) CHECK(s >= 0.0);
  CHECK_THROWS_AS(empirical_density(e, 0.5, 10), ParameterError);
  const auto narrow = empirical_density(e, 0.7, 4, -0.1, 0.1);
  CHECK(narrow.outside > 0.0);
}

TEST_CASE("empirical mgf") {
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  const auto e = simulate_dyson(2, Origin{}, grid, params(20000, 99));
  const std::vector<double> times = {0.5, 1.0};
  std::vector<std::function<double(double)>> zero = {[](double) { return 0.0; }, [](double) { return 0.0; }};
  const auto z = empirical_mgf(e, times, zero);
  CHECK(z.estimate == 1.0);
  CHECK(z.std_error == 0.0);

  // first order in θ
  const double th = 1e-3;
  const std::vector<double> t1 = {1.0};
  std::vector<std::function<double(double)>> f1 = {[th](double x) { return (x > -0.5 && x < 0.5) ? th : 0.0; }};
  double count = 0.0;
  for (int r = 0; r < e.replicas; ++r)
    for (double x : e.slice(r, 2)) count += (x > -0.5 && x < 0.5);
  count /= e.replicas;
  CHECK(std::log(empirical_mgf(e, t1, f1).estimate) == doctest::Approx(th * count).epsilon(2e-3));

  // two times against the Fredholm determinant of the extended kernel
  const double a1 = 0.6, a2 = -0.9;
  std::vector<std::function<double(double)>> f2 = {[a1](double x) { return (x > -0.5 && x < 0.5) ? a1 : 0.0; },
                                                   [a2](double x) { return (x > 0.0 && x < 1.0) ? a2 : 0.0; }};
  const auto mc = empirical_mgf(e, times, f2);
  auto K = [](double s, double x, double t, double y) { return kernels::finite_hermite_kernel(2, s, x, t, y); };
  std::vector<dpp::TimeSlice> sl = {{0.5, {{-0.5, 0.5}}, [a1](double) { return std::expm1(a1); }},
                                    {1.0, {{0.0, 1.0}}, [a2](double) { return std::expm1(a2); }}};
  const auto fd = dpp::multitime_fredholm(K, sl, 32);
  INFO("mc " << mc.estimate << " ± " << mc.std_error << ", fredholm " << fd.value);
  CHECK(std::abs(mc.estimate - fd.value) <= 3 * mc.std_error);

  std::vector<std::function<double(double)>> huge = {[](double) { return 400.0; }, [](double) { return 0.0; }};
  CHECK_THROWS_AS(empirical_mgf(e, times, huge), NumericalError);
  std::vector<std::function<double(double)>> nan = {[](double) { return NAN; }, [](double) { return 0.0; }};
  CHECK_THROWS_AS(empirical_mgf(e, times, nan), NumericalError);
  const std::vector<double> off = {0.25, 1.0};
  CHECK_THROWS_AS(empirical_mgf(e, off, zero), ParameterError);
}

TEST_CASE("scaling maps") {
  const auto b = scaling_map({0.0, 0.3}, ScalingMap::bulk, 10);
  CHECK(b.t == doctest::Approx(20 / (pi * pi)).epsilon(1e-15));
  CHECK(b.x == 0.3);
  const auto s = scaling_map({0.0, 0.7}, ScalingMap::soft_edge, 8);
  CHECK(s.t == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.x == doctest::Approx(8.7).epsilon(1e-15));
  const auto h = scaling_map({1.0, 0.2}, ScalingMap::hard_edge, 4);
  CHECK(h.t == 5.0);
  CHECK(h.x == 0.2);
  const auto s1 = scaling_map({1.0, 0.0}, ScalingMap::soft_edge, 27);
  CHECK(s1.x == doctest::Approx(18 + 3 - 0.25).epsilon(1e-15));
  CHECK(parse_scaling_map("hard_edge") == ScalingMap::hard_edge);
  CHECK_THROWS_AS(parse_scaling_map("edge"), ParameterError);
  CHECK_THROWS_AS(scaling_map({}, ScalingMap::bulk, 0), ParameterError);
}

TEST_CASE("ensemble persistence") {
  const std::vector<double> grid = {0.0, 0.2, 0.5};
  const auto e = simulate_drifted(3, Origin{}, grid, params(7, 42), kernels::semicircle_drift(3));
  const auto dir = std::filesystem::temp_directory_path() / "detproc_test_ens";
  std::filesystem::create_directories(dir);
  save_ensemble(e, dir / "run");
  const auto back = load_ensemble(dir / "run.bin");
  CHECK(back == e);
  CHECK(std::filesystem::file_size(dir / "run.bin") > 8 * e.positions.size());
  std::ifstream js(dir / "run.json");
  const auto meta = nlohmann::json::parse(js);
  CHECK(meta["model"] == "drifted");
  CHECK(meta["drift_id"] == "semicircle");
  CHECK(meta["time_grid"].size() == 3);

  std::ofstream junk(dir / "junk.bin", std::ios::binary);
  junk << "not an ensemble";
  junk.close();
  CHECK_THROWS_AS(load_ensemble(dir / "junk.bin"), ParameterError);

  std::ostringstream os;
  write_slice_csv(os, e, 0.2);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "replica,particle,x");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 21);
  std::filesystem::remove_all(dir);
}

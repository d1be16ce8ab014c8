#include "detproc/acceptance.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "detproc/configspace/configspace.hpp"
#include "detproc/dpp/dpp.hpp"
#include "detproc/dynamics/dynamics.hpp"
#include "detproc/error.hpp"
#include "detproc/kernels/classical.hpp"
#include "detproc/kernels/drift.hpp"
#include "detproc/kernels/finite.hpp"
#include "detproc/quadrature.hpp"
#include "detproc/rng.hpp"
#include "detproc/specfun/asymptotics.hpp"
#include "detproc/specfun/oscillator.hpp"
#include "detproc/specfun/transition.hpp"

namespace detproc::acceptance {
namespace {

using nlohmann::json;
constexpr double pi = std::numbers::pi;

std::string sci(double v, int digits = 3) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return buf;
}

Result named(std::string id, std::string name) {
  Result r;
  r.id = std::move(id);
  r.name = std::move(name);
  return r;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + sci(v[i]);
  return s;
}

double integral(const std::function<double(double)>& f, double a, double b) {
  const auto r = quad::integrate(f, a, b, 1e-11, 1e-10);
  return r.value;
}

// ---- 1
Result christoffel_darboux(const Options& opt) {
  Result r = named("1", "christoffel-darboux");
  double worst = 0.0;
  json rows = json::array();
  for (int N : {10, 50, 200})
    for (double x : {0.0, 1.0, 5.0, 10.0}) {
      auto phi = specfun::hermite_phi_table(N + 1, x);
      if (opt.inject_fault)
        for (int k = 1; k <= N + 1; k += 4) phi[k] = -phi[k];
      double lhs = 0.0;
      for (int k = 0; k < N; ++k) lhs += phi[k] * phi[k];
      const double rhs = N * phi[N] * phi[N] - std::sqrt(double(N) * (N + 1)) * phi[N + 1] * phi[N - 1];
      const double rel = std::abs(lhs - rhs) / lhs;
      worst = std::max(worst, rel);
      rows.push_back({{"N", N}, {"x", x}, {"lhs", lhs}, {"rhs", rhs}, {"rel_err", rel}});
    }
  r.pass = worst <= 1e-10;
  r.summary = "max |lhs-rhs|/lhs = " + sci(worst) + " (limit 1e-10)" + (opt.inject_fault ? " [fault injected]" : "");
  r.details = {{"rows", rows}, {"fault_injected", opt.inject_fault}};
  return r;
}

// ---- 2
Result plancherel_rotach() {
  Result r = named("2", "plancherel-rotach-rate");
  std::vector<double> errs;
  for (int N : {100, 200, 400}) {
    // error relative to the local envelope, RMS over a window around θ = π/3
    double num = 0.0, den = 0.0;
    for (int i = -50; i <= 50; ++i) {
      const double x = std::sqrt(2.0 * (N + 1)) * std::cos(pi / 3 + 0.002 * i);
      const double ex = specfun::hermite_phi(N, x);
      const double ap = specfun::pr_hermite(N, x, 3).value;
      num += (ap - ex) * (ap - ex);
      den += ex * ex;
    }
    errs.push_back(std::sqrt(num / den));
  }
  const double q1 = errs[1] / errs[0], q2 = errs[2] / errs[1];
  r.pass = q1 >= 0.3 && q1 <= 0.7 && q2 >= 0.3 && q2 <= 0.7;
  r.summary = "err(N=100,200,400) = " + list(errs) + "; ratios " + sci(q1) + ", " + sci(q2) + " (need [0.3, 0.7])";
  r.details = {{"errors", errs}, {"ratios", {q1, q2}}, {"theta", "pi/3 ± 0.1, RMS"}};
  return r;
}

// ---- 3
Result airy_density_asymptotics() {
  Result r = named("3", "airy-density-asymptotics");
  double worst = 0.0, at = 0.0;
  for (int i = 0; i <= 9000; ++i) {
    const double x = 5.0 + 0.005 * i;
    const double v = x * std::abs(kernels::airy_density(-x) - std::sqrt(x) / pi);
    if (v > worst) worst = v, at = x;
  }
  const double right = kernels::airy_density(5.0);
  r.pass = worst <= 1.0 && right <= 1e-6;
  r.summary = "max x|ρ_Ai(-x) - √x/π| = " + sci(worst) + " at x = " + sci(at) + "; ρ_Ai(5) = " + sci(right);
  r.details = {{"max_scaled_error", worst}, {"argmax", at}, {"rho_Ai_5", right}};
  return r;
}

// ---- 4
Result edge_semicircle() {
  Result r = named("4", "edge-semicircle-bound");
  std::vector<double> c;
  for (int N : {50, 200}) {
    double m = 0.0;
    auto scan = [&](double x) { m = std::max(m, std::abs(x) * std::abs(kernels::rho_A(N, x) - kernels::semicircle_edge(N, x))); };
    for (double x = -4 * std::pow(N, 0.09); x <= -5; x += 0.01) scan(x);
    for (double x = 5; x <= 20; x += 0.05) scan(x);
    c.push_back(m);
  }
  // "no growth with N": the larger N may not exceed the smaller by more than 10%
  r.pass = c[1] <= 1.1 * c[0];
  r.summary = "sup |x||ρ_A^N - ρ̂^N_sc| at N=50,200 = " + list(c) + "; ratio " + sci(c[1] / c[0]) + " (need ≤ 1.1)";
  r.details = {{"constants", c}, {"ratio", c[1] / c[0]}};
  return r;
}

// ---- 5, 5b
Result bulk(double time_factor, bool literal) {
  Result r = named(literal ? "5" : "5b", literal ? "bulk-convergence" : "bulk-convergence-unit-density-time");
  r.informational = !literal;
  std::vector<double> e;
  for (int N : {10, 50, 200}) {
    const double t = time_factor * N / (pi * pi);
    double m = 0.0;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const double x = -2 + 0.1 * i, y = -2 + 0.1 * j;
        m = std::max(m, std::abs(kernels::finite_hermite_kernel(N, t, x, t, y) - kernels::sine_kernel(x, y)));
      }
    e.push_back(m);
  }
  r.pass = strictly_decreasing(e) && e[2] <= 0.02;
  r.summary = std::string("t = ") + (literal ? "2N/π²" : "N/π²") + ": sup error N=10,50,200 = " + list(e) +
              " (need decreasing, ≤ 0.02 at 200)";
  r.details = {{"sup_errors", e}, {"time", literal ? "2N/pi^2" : "N/pi^2"}};
  return r;
}

// ---- 6, 6b
Result hard_edge(double time_factor, bool literal) {
  Result r = named(literal ? "6" : "6b", literal ? "hard-edge-convergence" : "hard-edge-convergence-time-N/2");
  r.informational = !literal;
  r.pass = true;
  json per_nu = json::object();
  std::string s = std::string("t = ") + (literal ? "N" : "N/2") + ":";
  for (double nu : {0.0, 0.5}) {
    std::vector<double> e;
    for (int N : {10, 50, 200}) {
      const double t = time_factor * N;
      double m = 0.0;
      for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) {
          const double x = 0.25 * i, y = 0.25 * j;
          m = std::max(m, std::abs(kernels::finite_laguerre_kernel(N, nu, t, x, t, y) - kernels::bessel_kernel(nu, x, y)));
        }
      e.push_back(m);
    }
    r.pass = r.pass && strictly_decreasing(e);
    s += " ν=" + sci(nu, 2) + " sup error N=10,50,200 = " + list(e) + ";";
    per_nu[sci(nu, 2)] = e;
  }
  r.summary = s + " (need decreasing)";
  r.details = {{"sup_errors", per_nu}, {"time", literal ? "N" : "N/2"}};
  return r;
}

// ---- 7
Result soft_edge() {
  Result r = named("7", "soft-edge-density");
  std::vector<double> e;
  for (int N : {20, 50, 200}) {
    double m = 0.0;
    for (int i = 0; i <= 800; ++i) {
      const double x = -5 + 0.01 * i;
      m = std::max(m, std::abs(kernels::rho_A(N, x) - kernels::airy_density(x)));
    }
    e.push_back(m);
  }
  r.pass = strictly_decreasing(e);
  r.summary = "L∞ on [-5,3] at N=20,50,200 = " + list(e) + " (need decreasing)";
  r.details = {{"sup_errors", e}};
  return r;
}

// ---- 8
Result equal_time() {
  Result r = named("8", "equal-time-reductions");
  auto grid = [](double a, double b) {
    std::vector<double> g;
    for (int i = 0; i < 20; ++i) g.push_back(a + (b - a) * i / 19.0);
    return g;
  };
  const double t = 0.7;
  double es = 0, eb = 0, ea = 0;
  for (double x : grid(-3, 3))
    for (double y : grid(-3, 3))
      es = std::max(es, std::abs(kernels::extended_sine_kernel(t, x, t, y) - kernels::sine_kernel(x, y)));
  for (double nu : {0.0, 0.5, 2.0})
    for (double x : grid(0.05, 6))
      for (double y : grid(0.05, 6))
        eb = std::max(eb, std::abs(kernels::extended_bessel_kernel(nu, t, x, t, y) - kernels::bessel_kernel(nu, x, y)));
  for (double x : grid(-4, 3))
    for (double y : grid(-4, 3))
      ea = std::max(ea, std::abs(kernels::extended_airy_kernel(t, x, t, y) - kernels::airy_kernel(x, y)));
  r.pass = std::max({es, eb, ea}) <= 1e-10;
  r.summary = "max diff sine " + sci(es) + ", bessel " + sci(eb) + ", airy " + sci(ea) + " (limit 1e-10)";
  r.details = {{"sine", es}, {"bessel", eb}, {"airy", ea}};
  return r;
}

// ---- 9
Result fredholm_mc(const Options& opt) {
  Result r = named("9", "fredholm-vs-monte-carlo");
  const int R = opt.full ? 100000 : 20000;
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  dynamics::SimParams p;
  p.replicas = R;
  p.seed = opt.seed;
  p.dt_max = 1e-3;
  p.threads = opt.threads;
  const auto ens = dynamics::simulate_dyson(2, dynamics::Origin{}, grid, p);
  const double a1 = 0.6, a2 = -0.9;
  const std::vector<double> times = {0.5, 1.0};
  std::vector<std::function<double(double)>> f = {[a1](double x) { return (x > -0.5 && x < 0.5) ? a1 : 0.0; },
                                                  [a2](double x) { return (x > 0.0 && x < 1.0) ? a2 : 0.0; }};
  const auto mc = dynamics::empirical_mgf(ens, times, f);
  auto K = [](double s, double x, double t, double y) { return kernels::finite_hermite_kernel(2, s, x, t, y); };
  std::vector<dpp::TimeSlice> sl = {{0.5, {{-0.5, 0.5}}, [a1](double) { return std::expm1(a1); }},
                                    {1.0, {{0.0, 1.0}}, [a2](double) { return std::expm1(a2); }}};
  const auto fd = dpp::multitime_fredholm(K, sl, 32);
  const double z = std::abs(mc.estimate - fd.value) / mc.std_error;
  r.pass = z <= 3.0;
  r.summary = "fredholm " + sci(fd.value, 6) + ", MC " + sci(mc.estimate, 6) + " ± " + sci(mc.std_error) + " (" +
              std::to_string(R) + " replicas): " + sci(z) + " σ (need ≤ 3)";
  r.details = {{"fredholm", fd.value},  {"fredholm_self_convergence", fd.self_convergence},
               {"mc_estimate", mc.estimate}, {"mc_std_error", mc.std_error},
               {"z_score", z},           {"replicas", R},
               {"rejected_steps", ens.rejected_steps}};
  return r;
}

// ---- 10, 11 share the sine samples on [0, 5]
struct SineSamples {
  dpp::SpectralDecomposition sd;
  std::vector<Configuration> samples;
};

SineSamples sine_samples(const Options& opt) {
  SineSamples s;
  s.sd = dpp::decompose(dpp::nystrom([](double x, double y) { return kernels::sine_kernel(x, y); }, {{0.0, 5.0}}, 48));
  s.samples = dpp::sample_many(s.sd, 10000, opt.seed, opt.threads);
  return s;
}

Result moment_bound(const SineSamples& S) {
  Result r = named("10", "moment-bound");
  const auto m1 = dpp::moment_diagnostic(S.samples, {0.0, 5.0}, 5.0, 1);
  const auto m2 = dpp::moment_diagnostic(S.samples, {0.0, 5.0}, 5.0, 2);
  r.pass = m1.empirical <= m1.bound + 3 * m1.std_error && m2.empirical <= m2.bound + 3 * m2.std_error;
  r.summary = "E|η-5|² = " + sci(m1.empirical) + " ± " + sci(m1.std_error) + " (≤ 15), E|η-5|⁴ = " +
              sci(m2.empirical) + " ± " + sci(m2.std_error) + " (≤ 225)";
  r.details = {{"second", {{"empirical", m1.empirical}, {"std_error", m1.std_error}, {"bound", m1.bound}}},
               {"fourth", {{"empirical", m2.empirical}, {"std_error", m2.std_error}, {"bound", m2.bound}}},
               {"samples", S.samples.size()}};
  return r;
}

Result sampler_fidelity(const SineSamples& S) {
  Result r = named("11", "sampler-fidelity");
  const double n = static_cast<double>(S.samples.size());
  // one-point: 10 bins of width 1/2, expected density 1
  const int B1 = 10;
  std::vector<double> s(B1, 0), s2(B1, 0);
  for (const auto& c : S.samples) {
    std::vector<double> cnt(B1, 0);
    for (double x : c.points()) cnt[std::min(B1 - 1, static_cast<int>(x / 0.5))] += 1;
    for (int b = 0; b < B1; ++b) s[b] += cnt[b], s2[b] += cnt[b] * cnt[b];
  }
  double worst1 = 0.0, chi2 = 0.0;
  for (int b = 0; b < B1; ++b) {
    const double m = s[b] / n, se = std::sqrt((s2[b] / n - m * m) / n);
    worst1 = std::max(worst1, std::abs(m - 0.5) / se);
    chi2 += (s[b] - 0.5 * n) * (s[b] - 0.5 * n) / (0.5 * n);
  }
  const double pval = boost::math::cdf(boost::math::complement(boost::math::chi_squared(B1 - 1), chi2));
  // two-point: ordered pairs over unit bins, against ∫∫ 1 - K²
  const int B2 = 5;
  double worst2 = 0.0;
  json pairs = json::array();
  for (int a = 0; a < B2; ++a)
    for (int b = a; b < B2; ++b) {
      double t = 0, t2 = 0;
      for (const auto& c : S.samples) {
        const auto pts = c.points();
        double k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
          for (std::size_t j = 0; j < pts.size(); ++j)
            if (i != j && static_cast<int>(pts[i]) == a && static_cast<int>(pts[j]) == b) k += 1;
        t += k, t2 += k * k;
      }
      const double emp = t / n, se = std::sqrt((t2 / n - emp * emp) / n);
      const double exact = integral(
          [&](double x) {
            return integral([&](double y) { return 1 - std::pow(kernels::sine_kernel(x, y), 2); }, b, b + 1.0);
          },
          a, a + 1.0);
      worst2 = std::max(worst2, std::abs(emp - exact) / se);
      pairs.push_back({{"bins", {a, b}}, {"empirical", emp}, {"std_error", se}, {"exact", exact}});
    }
  r.pass = worst1 <= 3 && worst2 <= 3 && pval > 0.001;
  r.summary = "1-point max " + sci(worst1) + " σ, χ² p = " + sci(pval) + "; 2-point max " + sci(worst2) +
              " σ (need ≤ 3 σ, p > 0.001)";
  r.details = {{"one_point_max_sigma", worst1}, {"chi2", chi2}, {"chi2_p", pval}, {"two_point_max_sigma", worst2},
               {"pairs", pairs}};
  return r;
}

// ---- 12
double l1_hist(const dynamics::Histogram& h, const std::function<double(double)>& f, double mass) {
  double d = 0.0, inside = 0.0;
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
    const double lo = h.edges[b], hi = h.edges[b + 1];
    const double ex = integral([&](double x) { return f(x) / mass; }, lo, hi);
    d += std::abs(h.density[b] / mass * (hi - lo) - ex);
    inside += ex;
  }
  return d + std::abs(1 - inside) + h.outside / mass;
}

Result sde_fidelity(const Options& opt) {
  Result r = named("12", "sde-fidelity");
  dynamics::SimParams p;
  p.seed = opt.seed;
  p.threads = opt.threads;

  p.replicas = 20000;
  p.dt_max = 0.01;
  const std::vector<double> g1 = {0.0, 1.0};
  const auto bm = dynamics::simulate_dyson(1, dynamics::Origin{}, g1, p);
  double s = 0, s2 = 0;
  for (int i = 0; i < bm.replicas; ++i) {
    const double v = bm.at(i, 1, 0) * bm.at(i, 1, 0);
    s += v, s2 += v * v;
  }
  const double var = s / bm.replicas, var_se = std::sqrt((s2 / bm.replicas - var * var) / bm.replicas);
  const double zvar = std::abs(var - 1.0) / var_se;

  p.replicas = 40000;
  p.dt_max = 1e-3;
  json besq = json::object();
  double worst_besq = 0.0;
  for (double nu : {0.0, 1.5, -0.5}) {
    const auto e = dynamics::simulate_besq(1, nu, std::vector<double>{1.0}, g1, p);
    const auto h = dynamics::empirical_density(e, 1.0, 30, 0.0, 30.0);
    const double d = l1_hist(h, [nu](double y) { return y > 0 ? specfun::bessel_transition(nu, 1.0, 1.0, y) : 0.0; }, 1.0);
    besq[sci(nu, 2)] = d;
    worst_besq = std::max(worst_besq, d);
  }

  const int N = 10;
  const double t = 2.0 * N / (pi * pi);
  p.replicas = 1000;
  p.dt_max = 2e-3;
  const std::vector<double> g3 = {0.0, 0.1, t};
  const auto gue = dynamics::simulate_dyson(N, dynamics::Origin{}, g3, p);
  const double edge = 2 * std::sqrt(t * N) + 3;
  const auto h = dynamics::empirical_density(gue, t, 20, -edge, edge);
  const double dg = l1_hist(h, [&](double x) { return kernels::gue_density(N, t, x); }, N);

  r.pass = zvar <= 3 && worst_besq < 0.05 && dg < 0.05 && gue.violations() == 0;
  r.summary = "BM var " + sci(var, 5) + " ± " + sci(var_se) + " (" + sci(zvar) + " σ); besq L1 max " +
              sci(worst_besq) + "; GUE N=10 L1 " + sci(dg) + " (need < 0.05)";
  r.details = {{"bm_variance", var},  {"bm_variance_std_error", var_se}, {"bm_z", zvar},
               {"besq_L1", besq},     {"gue_L1", dg},                    {"gue_replicas", 1000},
               {"gue_violations", gue.violations()}};
  return r;
}

// ---- 13
Result configuration_functionals(const Options& opt) {
  Result r = named("13", "configuration-functionals");
  using configspace::cplx;
  auto rng = SplitMix64::stream(opt.seed, 13);
  std::uniform_real_distribution<double> U(-6.0, 6.0);
  auto random_config = [&](int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(U(rng));
    return Configuration::from_points(v);
  };
  double mult = 0.0, trans = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_config(6), b = random_config(5);
    const cplx z(U(rng) * 0.1, 0.7), w(U(rng) * 0.3, U(rng) * 0.3);
    const double sh = U(rng);
    for (int p : {0, 1, 2}) {
      const cplx ab = configspace::phi_entire(a + b, p, z, w);
      const cplx prod = configspace::phi_entire(a, p, z, w) * configspace::phi_entire(b, p, z, w);
      mult = std::max(mult, std::abs(ab - prod) / std::max(1.0, std::abs(ab)));
      const cplx tr = configspace::phi_entire(a.translated(sh), p, z + sh, w + sh);
      const cplx orig = configspace::phi_entire(a, p, z, w);
      trans = std::max(trans, std::abs(tr - orig) / std::max(1.0, std::abs(tr)));
    }
  }
  bool g_exact = true;
  for (cplx u : {cplx(0.0), cplx(0.5), cplx(-2.0), cplx(1.0), cplx(3.0, -1.5), cplx(0.25, 0.75)})
    g_exact = g_exact && configspace::weierstrass_G(u, 0) == 1.0 - u;
  double worst_tri = -1e300;
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_config(4), b = random_config(4), c = random_config(4);
    const double ac = configspace::moderate_distance(a, c, 2.0);
    const double ab = configspace::moderate_distance(a, b, 2.0), bc = configspace::moderate_distance(b, c, 2.0);
    worst_tri = std::max(worst_tri, (ac - ab - bc) / std::max(1.0, ab + bc));
  }
  r.pass = mult <= 1e-12 && trans <= 1e-12 && g_exact && worst_tri <= 1e-12;
  r.summary = "multiplicativity " + sci(mult) + ", translation " + sci(trans) + " (≤ 1e-12); G(u,0) = 1-u " +
              (g_exact ? "exact" : "NOT exact") + "; triangle excess " + sci(worst_tri);
  r.details = {{"multiplicativity", mult}, {"translation", trans}, {"G_exact", g_exact}, {"triangle_excess", worst_tri}};
  return r;
}

// ---- 14
Result drift_identity() {
  Result r = named("14", "drift-identity");
  double worst = 0.0;
  json rows = json::array();
  for (int N : {8, 27, 125}) {
    const double lower = -4 * std::pow(N, 2.0 / 3.0);
    const auto d = kernels::make_drift_density("semicircle_numeric", N, [N](double x) { return kernels::semicircle_edge(N, x); },
                                               lower);
    const double val = -d.inv_moment, exact = std::cbrt(static_cast<double>(N));
    const double rel = std::abs(val - exact) / exact;
    worst = std::max(worst, rel);
    rows.push_back({{"N", N}, {"integral", val}, {"N^(1/3)", exact}, {"rel_err", rel}});
  }
  r.pass = worst <= 1e-8;
  r.summary = "max rel err of ∫ρ̂/(-x) vs N^{1/3} = " + sci(worst) + " (limit 1e-8)";
  r.details = {{"rows", rows}};
  return r;
}

template <class F>
Result timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = f();
  } catch (const std::exception& e) {
    r.pass = false;
    r.summary = std::string("threw: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

std::vector<Result> run(const Options& opt, const std::function<void(const Result&)>& progress) {
  std::vector<Result> out;
  auto add = [&](Result r, const char* id, const char* name) {
    if (r.id.empty()) r.id = id, r.name = name;
    if (progress) progress(r);
    out.push_back(std::move(r));
  };
  add(timed([&] { return christoffel_darboux(opt); }), "1", "christoffel-darboux");
  add(timed([&] { return plancherel_rotach(); }), "2", "plancherel-rotach-rate");
  add(timed([&] { return airy_density_asymptotics(); }), "3", "airy-density-asymptotics");
  add(timed([&] { return edge_semicircle(); }), "4", "edge-semicircle-bound");
  add(timed([&] { return bulk(2.0, true); }), "5", "bulk-convergence");
  add(timed([&] { return hard_edge(1.0, true); }), "6", "hard-edge-convergence");
  add(timed([&] { return soft_edge(); }), "7", "soft-edge-density");
  add(timed([&] { return equal_time(); }), "8", "equal-time-reductions");
  add(timed([&] { return fredholm_mc(opt); }), "9", "fredholm-vs-monte-carlo");
  std::optional<SineSamples> S;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    S = sine_samples(opt);
  } catch (const std::exception&) {
  }
  const double sampling = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto with_samples = [&](auto f, const char* id, const char* name) {
    Result r = timed([&] {
      if (!S) throw NumericalError("sine-kernel sampling failed");
      return f(*S);
    });
    r.seconds += sampling / 2;
    add(std::move(r), id, name);
  };
  with_samples(moment_bound, "10", "moment-bound");
  with_samples(sampler_fidelity, "11", "sampler-fidelity");
  add(timed([&] { return sde_fidelity(opt); }), "12", "sde-fidelity");
  add(timed([&] { return configuration_functionals(opt); }), "13", "configuration-functionals");
  add(timed([&] { return drift_identity(); }), "14", "drift-identity");
  add(timed([&] { return bulk(1.0, false); }), "5b", "bulk-convergence-unit-density-time");
  add(timed([&] { return hard_edge(0.5, false); }), "6b", "hard-edge-convergence-time-N/2");
  return out;
}

std::string format_line(const Result& r) {
  std::ostringstream os;
  os << "criterion " << r.id << (r.id.size() < 2 ? "  " : " ") << "[" << r.name << "] "
     << (r.pass ? "PASS" : "FAIL") << (r.informational ? " (informational)" : "") << "  " << r.summary << "  ("
     << sci(r.seconds, 2) << " s)";
  return os.str();
}

bool all_pass(const std::vector<Result>& rs) {
  for (const auto& r : rs)
    if (!r.informational && !r.pass) return false;
  return true;
}

nlohmann::json to_json(const std::vector<Result>& rs, const Options& opt) {
  json arr = json::array();
  for (const auto& r : rs)
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"informational", r.informational},
                   {"summary", r.summary},
                   {"seconds", r.seconds},
                   {"details", r.details}});
  return {{"suite", opt.full ? "full" : "fast"},
          {"seed", opt.seed},
          {"fault_injected", opt.inject_fault},
          {"all_pass", all_pass(rs)},
          {"criteria", arr}};
}

}  // namespace detproc::acceptance

#include "detproc/configspace/configspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "detproc/error.hpp"
#include "detproc/quadrature.hpp"

namespace detproc::configspace {
namespace {

cplx ipow(cplx b, int e) {
  cplx r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

bool same_point(double x, cplx z) { return z.imag() == 0.0 && z.real() == x; }

std::vector<double> default_grid(const Configuration& xi) {
  double R = 0.0;
  for (double x : xi.points()) R = std::max(R, std::abs(x));
  if (R == 0.0) R = 1.0;
  std::vector<double> g;
  for (int k = 7; k >= 0; --k) g.push_back(R * std::ldexp(1.0, -k));
  return g;
}

template <class F>
GridLimit grid_limit(std::span<const double> L_grid, double tol, F&& at) {
  if (L_grid.empty()) throw ParameterError("grid limit: L_grid must not be empty");
  if (!std::is_sorted(L_grid.begin(), L_grid.end())) throw ParameterError("grid limit: L_grid must be ascending");
  GridLimit g;
  for (double L : L_grid) g.trail.emplace_back(L, at(L));
  g.value = g.trail.back().second;
  if (g.trail.size() >= 2) {
    const double prev = g.trail[g.trail.size() - 2].second;
    g.converged = std::abs(g.value - prev) <= tol * std::max(1.0, std::abs(g.value));
  }
  return g;
}

std::pair<double, double> mode_range(Mode m) {
  switch (m) {
    case Mode::Y: return {0.5, 1.0};
    case Mode::Y_plus: return {1.0, 2.0};
    case Mode::Y_A: return {0.5, 2.0 / 3.0};
  }
  return {0.0, 0.0};
}

}  // namespace

cplx weierstrass_G(cplx u, int p) {
  if (p < 0) throw ParameterError("weierstrass_G: p must be >= 0");
  if (p == 0) return 1.0 - u;
  cplx e = 0.0, uk = 1.0;
  for (int k = 1; k <= p; ++k) {
    uk *= u;
    e += uk / static_cast<double>(k);
  }
  return (1.0 - u) * std::exp(e);
}

cplx phi_entire(const Configuration& xi, int p, cplx z, cplx w) {
  if (p < 0) throw ParameterError("phi_entire: p must be >= 0");
  const auto pts = xi.points();
  const auto mult = xi.multiplicities();
  cplx prod = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (same_point(pts[i], z)) continue;
    prod *= ipow(weierstrass_G((w - z) / (pts[i] - z), p), mult[i]);
  }
  return prod;
}

double tail_moment_M(const Configuration& xi, double L) {
  const auto pts = xi.points();
  const auto mult = xi.multiplicities();
  // each side summed outward from 0, so symmetric configurations cancel exactly
  const auto first_pos = std::upper_bound(pts.begin(), pts.end(), 0.0) - pts.begin();
  const auto last_neg = std::lower_bound(pts.begin(), pts.end(), 0.0) - pts.begin() - 1;
  double pos = 0.0, neg = 0.0;
  for (auto i = first_pos; i < static_cast<std::ptrdiff_t>(pts.size()) && pts[i] <= L; ++i) pos += mult[i] / pts[i];
  for (auto i = last_neg; i >= 0 && -pts[i] <= L; --i) neg += mult[i] / pts[i];
  return pos + neg;
}

double tail_moment_M_alpha(const Configuration& xi, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("tail_moment_M_alpha: alpha must be > 0");
  const auto pts = xi.points();
  const auto mult = xi.multiplicities();
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i] != 0.0) s += mult[i] * std::pow(std::abs(pts[i]), -alpha);
  return std::pow(s, 1.0 / alpha);
}

GridLimit tail_moment_M_limit(const Configuration& xi, std::span<const double> L_grid, double tol) {
  return grid_limit(L_grid, tol, [&](double L) { return tail_moment_M(xi, L); });
}

long m_kappa(const Configuration& xi, double kappa) {
  if (!(kappa > 0.0)) throw ParameterError("m_kappa: kappa must be > 0");
  std::map<long, long> cells;
  const auto pts = xi.points();
  const auto mult = xi.multiplicities();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i];
    // g^κ is increasing; cell k holds x iff g(k) ≤ x ≤ g(k+1)
    const double v = std::copysign(std::pow(std::abs(x), 1.0 / kappa), x);
    const double fl = std::floor(v);
    const auto k = static_cast<long>(fl);
    cells[k] += mult[i];
    // x on a cell boundary g(k) belongs to both closed cells
    const double gk = std::copysign(std::pow(std::abs(fl), kappa), fl);
    if (std::abs(x - gk) <= 1e-12 * std::max(1.0, std::abs(x))) cells[k - 1] += mult[i];
  }
  long best = 0;
  for (const auto& [k, c] : cells) best = std::max(best, c);
  return best;
}

GridLimit M_A(const Configuration& xi, std::span<const double> L_grid, double tol) {
  return grid_limit(L_grid, tol, [&](double L) {
    return -2.0 / std::numbers::pi * std::sqrt(L) - tail_moment_M(xi, std::nextafter(L, 0.0));
  });
}

GridLimit M_A(const Configuration& xi, const kernels::DriftDensity& rho, std::span<const double> L_grid, double tol) {
  return grid_limit(L_grid, tol, [&](double L) {
    const double lo = std::max(-L, rho.lower);
    double part = 0.0;
    if (lo < 0.0) {
      // x = -r²: ρ(x)/x dx = -2ρ(-r²)/r dr, finite for ρ ~ √(-x)
      auto r = quad::integrate([&](double q) { return q == 0.0 ? 0.0 : -2.0 * rho.rho(-q * q) / q; }, 0.0,
                               std::sqrt(-lo), 1e-13, 1e-11, 4000);
      part = r.value;
    }
    return part - tail_moment_M(xi, std::nextafter(L, 0.0));
  });
}

double M_rho(const Configuration& xi, const kernels::DriftDensity& drift) {
  return drift.inv_moment - tail_moment_M(xi, INFINITY);
}

cplx phi_A(const Configuration& xi, cplx z, cplx w, const kernels::DriftDensity& drift) {
  // M_{ρ̂}(τ_{-z}ξ) = ∫ρ̂/x - Σ_{x≠z} ξ({x})/(x - z)
  const auto pts = xi.points();
  const auto mult = xi.multiplicities();
  cplx M = drift.inv_moment;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!same_point(pts[i], z)) M -= static_cast<double>(mult[i]) / (pts[i] - z);
  return std::exp((w - z) * M) * phi_entire(xi, 1, z, w);
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Y: return "Y";
    case Mode::Y_plus: return "Y_plus";
    case Mode::Y_A: return "Y_A";
  }
  return "?";
}

ConditionReport check_conditions(const Configuration& xi, std::span<const double> kappas,
                                 std::span<const long> ms, Mode mode, const ConditionOptions& opt) {
  const auto range = mode_range(mode);
  for (double k : kappas)
    if (!(k > range.first && k < range.second))
      throw ParameterError("check_conditions: kappa " + std::to_string(k) + " outside (" +
                           std::to_string(range.first) + ", " + std::to_string(range.second) + ") for mode " +
                           to_string(mode));
  ConditionReport r;
  r.mode = mode;
  r.kappa_range_used = range;
  const std::vector<double> grid = opt.L_grid.empty() ? default_grid(xi) : opt.L_grid;

  r.M_trail = tail_moment_M_limit(xi, grid, opt.tol);
  if (r.M_trail.converged) r.M_value = r.M_trail.value;
  r.CI = r.M_trail.converged && std::isfinite(r.M_trail.value);
  for (double a : opt.alphas) r.M_alpha[a] = tail_moment_M_alpha(xi, a);

  bool any_cii = false;
  for (double k : kappas) {
    const long mk = m_kappa(xi, k);
    r.m_kappa[k] = mk;
    for (long m : ms) {
      const bool ok = mk <= m;
      r.CII[{k, m}] = ok;
      any_cii = any_cii || ok;
    }
  }
  if (mode == Mode::Y_A) {
    auto ma = opt.comparison ? M_A(xi, *opt.comparison, grid, opt.tol) : M_A(xi, grid, opt.tol);
    if (ma.converged) r.M_A_value = ma.value;
    r.CIA = ma.converged && std::isfinite(ma.value);
  }
  switch (mode) {
    case Mode::Y: r.member = r.CI && any_cii; break;
    case Mode::Y_plus: r.member = any_cii; break;
    case Mode::Y_A: r.member = r.CIA && any_cii; break;
  }
  return r;
}

nlohmann::json to_json(const ConditionReport& r) {
  using nlohmann::json;
  json j;
  j["mode"] = to_string(r.mode);
  j["M_value"] = r.M_value ? json(*r.M_value) : json("divergent");
  json trail = json::array();
  for (const auto& [L, v] : r.M_trail.trail) trail.push_back({{"L", L}, {"M", v}});
  j["M_trail"] = trail;
  json ma = json::object();
  for (const auto& [a, v] : r.M_alpha) ma[std::to_string(a)] = v;
  j["M_alpha"] = ma;
  json mk = json::object();
  for (const auto& [k, v] : r.m_kappa) mk[std::to_string(k)] = v;
  j["m_kappa"] = mk;
  j["CI"] = r.CI;
  json cii = json::array();
  for (const auto& [km, ok] : r.CII) cii.push_back({{"kappa", km.first}, {"m", km.second}, {"holds", ok}});
  j["CII"] = cii;
  j["CIA"] = r.CIA;
  j["M_A_value"] = r.M_A_value ? json(*r.M_A_value) : json("divergent");
  j["kappa_range_used"] = {r.kappa_range_used.first, r.kappa_range_used.second};
  j["member"] = r.member;
  return j;
}

double moderate_distance(const Configuration& xi1, const Configuration& xi2, double radius, int n_radial,
                         int n_angular) {
  if (!(radius >= 0.0) || n_radial < 1 || n_angular < 1) throw ParameterError("moderate_distance: bad grid");
  const cplx z(0.0, 1.0);
  double best = 0.0;
  for (int i = 0; i < n_radial; ++i) {
    const double r = n_radial == 1 ? radius : radius * i / (n_radial - 1);
    for (int j = 0; j < n_angular; ++j) {
      const cplx w = std::polar(r, 2.0 * std::numbers::pi * j / n_angular);
      best = std::max(best, std::abs(phi_entire(xi1, 0, z, w) - phi_entire(xi2, 0, z, w)));
      if (i == 0) break;  // the centre needs one evaluation
    }
  }
  return best;
}

}  // namespace detproc::configspace

#include "detproc/kernels/spec.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "detproc/configspace/configspace.hpp"
#include "detproc/error.hpp"
#include "detproc/kernels/classical.hpp"
#include "detproc/kernels/finite.hpp"
#include "detproc/quadrature.hpp"
#include "detproc/specfun/transition.hpp"

namespace detproc::kernels {
namespace {

using cplx = std::complex<double>;

const quad::Rule& unit_rule(int n) {
  thread_local std::map<int, quad::Rule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, quad::gauss_legendre(n, -1.0, 1.0)).first;
  return it->second;
}

// ∫ dv (2πt)^{-1/2} e^{-v²/(2t)} Re Φ_0(ξ, x', c + iv) with n nodes on |v| ≤ R.
double gaussian_line(const Configuration& xi, double xp, double c, double t, double R, int n) {
  const auto& r = unit_rule(n);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v = R * r.nodes[i];
    const cplx phi = configspace::phi_entire(xi, 0, xp, cplx(c, v));
    acc += r.weights[i] * std::exp(-v * v / (2.0 * t)) * phi.real();
  }
  return R * norm * acc;
}

struct LineResult {
  double value, residual;
};

LineResult line_integral(const Configuration& xi, double xp, double c, double t, const ConfigQuad& q) {
  const double R = q.radius_sigmas * std::sqrt(t);
  const double fine = gaussian_line(xi, xp, c, t, R, q.n_nodes);
  const double coarse = gaussian_line(xi, xp, c, t, R, std::max(q.n_nodes / 2, 2));
  return {fine, std::abs(fine - coarse)};
}

void check_residual(double residual, double scale, const ConfigQuad& q) {
  if (residual > std::max(q.abs_tol, q.rel_tol * scale))
    throw NumericalError("config_kernel: u-quadrature residual " + std::to_string(residual) +
                         " exceeds tolerance; increase n_nodes or radius_sigmas");
}

double besq_config(const KernelSpec& spec, double s, double x, double t, double y, const ConfigQuad& q) {
  const double nu = *spec.nu;
  const auto& xi = *spec.xi;
  double total = 0.0, scale = 0.0, residual = 0.0;
  for (double xp : xi.points()) {
    // u = -r² removes the |u|^{ν/2} endpoint behaviour
    auto f = [&](double r) {
      const double u = -r * r;
      return 2.0 * r * configspace::phi_entire(xi, 0, xp, u).real() * specfun::bessel_backward_continued(nu, t, u, y);
    };
    auto res = quad::integrate_to_infinity(f, 0.0, q.abs_tol * 1e-2, q.rel_tol * 1e-2, 8000);
    const double w = specfun::bessel_transition(nu, s, xp, x);
    total += w * res.value;
    scale += std::abs(w * res.value);
    residual += std::abs(w) * res.abs_error;
  }
  check_residual(residual, scale, q);
  if (s > t) total -= specfun::bessel_transition(nu, s - t, y, x);
  return total;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::sine: return "sine";
    case Family::airy: return "airy";
    case Family::bessel: return "bessel";
    case Family::hermiteN: return "hermiteN";
    case Family::laguerreN: return "laguerreN";
    case Family::config_dyson: return "config_dyson";
    case Family::config_besq: return "config_besq";
    case Family::config_drifted: return "config_drifted";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  for (Family f : {Family::sine, Family::airy, Family::bessel, Family::hermiteN, Family::laguerreN,
                   Family::config_dyson, Family::config_besq, Family::config_drifted})
    if (s == to_string(f)) return f;
  throw ParameterError("unknown kernel family '" + s + "'");
}

bool is_config(Family f) {
  return f == Family::config_dyson || f == Family::config_besq || f == Family::config_drifted;
}

bool needs_nu(Family f) {
  return f == Family::bessel || f == Family::laguerreN || f == Family::config_besq;
}

void KernelSpec::validate() const {
  const std::string name = to_string(family);
  if (needs_nu(family)) {
    if (!nu) throw ParameterError(name + ": nu is required");
    if (!(*nu > -1.0)) throw DomainError(name + ": nu must be > -1");
  } else if (nu) {
    throw ParameterError(name + ": nu is not a parameter of this family");
  }
  const bool finite = family == Family::hermiteN || family == Family::laguerreN;
  if (finite && !N) throw ParameterError(name + ": N is required");
  if (N && *N < 1) throw ParameterError(name + ": N must be >= 1");
  if (!finite && !is_config(family) && N) throw ParameterError(name + ": N is not a parameter of this family");
  if (is_config(family)) {
    if (!xi) throw ParameterError(name + ": a starting configuration xi is required");
    if (!xi->is_simple()) throw UnsupportedConfigurationError(name + ": xi has multiple points");
    if (xi->empty()) throw ParameterError(name + ": xi is empty");
    if (family == Family::config_besq)
      for (double p : xi->points())
        if (p < 0.0) throw DomainError(name + ": xi must lie in [0, inf)");
  } else if (xi) {
    throw ParameterError(name + ": xi is only used by config families");
  }
  if (family == Family::config_drifted && !drift) throw ParameterError(name + ": a drift density is required");
}

double config_kernel(const KernelSpec& spec, double s, double x, double t, double y, const ConfigQuad& q) {
  spec.validate();
  if (!is_config(spec.family)) throw ParameterError("config_kernel: not a config family");
  if (!(s > 0.0) || !(t > 0.0)) throw DomainError("config_kernel: s and t must be > 0");
  if (q.n_nodes < 4) throw ParameterError("config_kernel: n_nodes must be >= 4");
  if (spec.family == Family::config_besq) {
    if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("config_kernel: x, y must be >= 0 for config_besq");
    return besq_config(spec, s, x, t, y, q);
  }

  const auto& xi = *spec.xi;
  double total = 0.0, scale = 0.0, residual = 0.0;
  if (spec.family == Family::config_dyson) {
    for (double xp : xi.points()) {
      const double w = specfun::heat_kernel_psin(s, x, xp);
      const auto li = line_integral(xi, xp, y, t, q);
      total += w * li.value;
      scale += std::abs(w * li.value);
      residual += std::abs(w) * li.residual;
    }
    check_residual(residual, scale, q);
    if (s > t) total -= specfun::heat_kernel_psin(s - t, x, y);
    return total;
  }

  // config_drifted: saddle of exp[(w-a)²/(2t) + wI] at w = a - tI, a = y - t²/4
  const double I = spec.drift->inv_moment;
  const double a = y - t * t / 4.0;
  const double c = a - t * I;
  for (double xp : xi.points()) {
    const double w = specfun::drift_kernel_q(0.0, s, x - xp) * std::exp((a - xp) * I - t * I * I / 2.0);
    const auto li = line_integral(xi, xp, c, t, q);
    total += w * li.value;
    scale += std::abs(w * li.value);
    residual += std::abs(w) * li.residual;
  }
  check_residual(residual, scale, q);
  if (s > t) total -= specfun::drift_kernel_q(t, s, x - y);
  return total;
}

double evaluate(const KernelSpec& spec, double s, double x, double t, double y, const ConfigQuad& q) {
  spec.validate();
  switch (spec.family) {
    case Family::sine: return extended_sine_kernel(s, x, t, y);
    case Family::airy: return extended_airy_kernel(s, x, t, y);
    case Family::bessel: return extended_bessel_kernel(*spec.nu, s, x, t, y);
    case Family::hermiteN: return finite_hermite_kernel(*spec.N, s, x, t, y);
    case Family::laguerreN: return finite_laguerre_kernel(*spec.N, *spec.nu, s, x, t, y);
    default: return config_kernel(spec, s, x, t, y, q);
  }
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 16);
  return std::string(buf.data(), end);
}

void write_kernel_table(std::ostream& os, const KernelSpec& spec, std::span<const KernelQuery> queries,
                        const ConfigQuad& q) {
  spec.validate();
  const std::string N = spec.N ? std::to_string(*spec.N) : "";
  const std::string nu = spec.nu ? format_double(*spec.nu) : "";
  os << "family,N,nu,s,x,t,y,value\n";
  for (const auto& k : queries) {
    os << to_string(spec.family) << ',' << N << ',' << nu << ',' << format_double(k.s) << ','
       << format_double(k.x) << ',' << format_double(k.t) << ',' << format_double(k.y) << ','
       << format_double(evaluate(spec, k.s, k.x, k.t, k.y, q)) << '\n';
  }
}

}  // namespace detproc::kernels

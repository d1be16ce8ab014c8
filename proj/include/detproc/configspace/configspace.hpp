#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "detproc/configuration.hpp"
#include "detproc/kernels/drift.hpp"

namespace detproc::configspace {

using cplx = std::complex<double>;

/// Weierstrass primary factor: 1-u for p = 0, (1-u)exp(u + u²/2 + … + u^p/p) otherwise.
cplx weierstrass_G(cplx u, int p);

/// Φ_p(ξ, z, w) = Π_{x ∈ supp ξ, x ≠ z} G((w-z)/(x-z), p)^{ξ({x})}.
cplx phi_entire(const Configuration& xi, int p, cplx z, cplx w);

/// M(ξ, L) = Σ_{0<|x|≤L} ξ({x})/x.
double tail_moment_M(const Configuration& xi, double L);

/// M_α(ξ) = (Σ_{x≠0} ξ({x})/|x|^α)^{1/α}.
double tail_moment_M_alpha(const Configuration& xi, double alpha);

/// A limit taken along a grid of cut-offs L.
struct GridLimit {
  double value = 0.0;
  bool converged = false;             // last two grid values agree to tol
  std::vector<std::pair<double, double>> trail;  // (L, value at L)
};

/// M(ξ) = lim_L M(ξ, L) along `L_grid` (sorted ascending), Cauchy tolerance `tol`.
GridLimit tail_moment_M_limit(const Configuration& xi, std::span<const double> L_grid, double tol = 1e-8);

/// m(ξ, κ) = max_k ξ([g^κ(k), g^κ(k+1)]), g^κ(x) = sgn(x)|x|^κ, cells closed.
long m_kappa(const Configuration& xi, double kappa);

/// M_A(ξ) = lim_L ∫_{0<|x|<L} (ρ̂(x)dx - ξ(dx))/x with ρ̂ = √(-x)/π 1(x<0);
/// the ρ̂ part is -(2/π)√L in closed form.
GridLimit M_A(const Configuration& xi, std::span<const double> L_grid, double tol = 1e-8);

/// Same with an explicit comparison density ρ (zero on x ≥ 0); its part
/// ∫_{-L}^0 ρ(x)/x dx is done by quadrature.
GridLimit M_A(const Configuration& xi, const kernels::DriftDensity& rho, std::span<const double> L_grid,
              double tol = 1e-8);

/// M_{ρ̂^N}(ξ) = ∫ρ̂^N(x)/x dx - Σ_{x≠0} ξ({x})/x for a finite-mass density.
double M_rho(const Configuration& xi, const kernels::DriftDensity& drift);

/// Φ_{ρ̂^N}(ξ, z, w) = exp[(w-z) M_{ρ̂^N}(τ_{-z}ξ)] Π_1(τ_{-z}ξ ∩ {0}^c, w-z).
/// With ρ̂^N held fixed under the shift this equals e^{(w-z)∫ρ̂^N/x} Φ_0(ξ, z, w).
cplx phi_A(const Configuration& xi, cplx z, cplx w, const kernels::DriftDensity& drift);

enum class Mode { Y, Y_plus, Y_A };

const char* to_string(Mode m);

struct ConditionOptions {
  std::vector<double> L_grid;    // empty: 8 geometric cut-offs up to max|x|
  std::vector<double> alphas{1.0, 2.0};
  double tol = 1e-8;
  std::optional<kernels::DriftDensity> comparison;  // Y_A only; default √(-x)/π in closed form
};

struct ConditionReport {
  Mode mode = Mode::Y;
  std::optional<double> M_value;  // empty when the grid limit is not Cauchy
  GridLimit M_trail;
  std::map<double, double> M_alpha;
  std::map<double, long> m_kappa;
  bool CI = false;
  std::map<std::pair<double, long>, bool> CII;
  bool CIA = false;
  std::optional<double> M_A_value;
  std::pair<double, double> kappa_range_used;
  bool member = false;  // mode's membership test for some listed (κ, m)
};

/// (C.I), (C.II) and (C.I-A) diagnostics for a finite configuration.
/// κ must lie in the mode's open range: Y (1/2,1), Y_plus (1,2), Y_A (1/2,2/3).
ConditionReport check_conditions(const Configuration& xi, std::span<const double> kappas,
                                 std::span<const long> ms, Mode mode, const ConditionOptions& opt = {});

nlohmann::json to_json(const ConditionReport& r);

/// sup over a polar grid on |w| ≤ radius of |Φ_0(ξ₁, i, w) - Φ_0(ξ₂, i, w)|.
double moderate_distance(const Configuration& xi1, const Configuration& xi2, double radius,
                         int n_radial = 16, int n_angular = 16);

}  // namespace detproc::configspace

#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "detproc/configuration.hpp"
#include "detproc/kernels/drift.hpp"

namespace detproc::kernels {

enum class Family { sine, airy, bessel, hermiteN, laguerreN, config_dyson, config_besq, config_drifted };

const char* to_string(Family f);
Family parse_family(const std::string& s);

bool is_config(Family f);
bool needs_nu(Family f);

/// Which kernel, with its parameters. N is required for the finite-N
/// families and optional (informational) for config families.
struct KernelSpec {
  Family family = Family::sine;
  std::optional<int> N;
  std::optional<double> nu;
  std::optional<Configuration> xi;
  std::optional<DriftDensity> drift;  // config_drifted only

  void validate() const;
};

/// Quadrature parameters for the configuration kernels.
///
/// The u-integrand is entire, so the integration line is moved to pass
/// through the saddle of the Gaussian factor; along it the integrand is
/// exactly Gaussian in v times a polynomial. `n_nodes` Gauss–Legendre nodes
/// cover |v| ≤ radius_sigmas·√t; the rule with half the nodes provides the
/// residual estimate. For the Bessel family the u-integral is over u < 0
/// and is done adaptively.
struct ConfigQuad {
  int n_nodes = 400;
  double radius_sigmas = 10.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
};

/// Correlation kernel of the process started from the simple finite
/// configuration spec.xi:
///   config_dyson:   Σ_{x'∈ξ} ∫du p_sin(s,x|x') Φ_0(ξ,x',iu) p_sin(-t,iu|y) - 1(s>t) p_sin(s-t,x|y)
///   config_besq:    Σ_{x'∈ξ} ∫_{-∞}^0 du p^{(ν)}(s,x|x') Φ_0(ξ,x',u) p^{(ν)}(-t,u|y) - 1(s>t) p^{(ν)}(s-t,x|y)
///   config_drifted: Σ_{x'∈ξ} ∫du q(0,s,x-x') Φ_{ρ̂^N}(ξ,x',iu) q(t,0,iu-y) - 1(s>t) q(t,s,x-y)
/// Requires s, t > 0. Multiple points are rejected.
double config_kernel(const KernelSpec& spec, double s, double x, double t, double y, const ConfigQuad& q = {});

/// Any kernel family at (s, x; t, y).
double evaluate(const KernelSpec& spec, double s, double x, double t, double y, const ConfigQuad& q = {});

struct KernelQuery {
  double s, x, t, y;
};

/// 17 significant digits in scientific notation; locale-independent and
/// round-trips every double.
std::string format_double(double v);

/// CSV with header family,N,nu,s,x,t,y,value; absent N or nu are left empty.
void write_kernel_table(std::ostream& os, const KernelSpec& spec, std::span<const KernelQuery> queries,
                        const ConfigQuad& q = {});

}  // namespace detproc::kernels

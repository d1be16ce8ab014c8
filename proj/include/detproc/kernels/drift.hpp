#pragma once

#include <functional>
#include <string>

namespace detproc::kernels {

/// A finite-mass approximation ρ̂^N of ρ̂(x) = √(-x)/π 1(x<0), together with
/// the two integrals the drifted dynamics need.
struct DriftDensity {
  std::string id;
  int N = 0;
  std::function<double(double)> rho;  // zero on x ≥ 0
  double lower = 0.0;                 // ρ̂^N vanishes below this point
  double mass = 0.0;                  // ∫ ρ̂^N
  double inv_moment = 0.0;            // ∫ ρ̂^N(x)/x dx  (≤ 0)
};

/// ρ̂^N_sc, the semicircle edge density; mass N and ∫ρ̂/x = -N^{1/3} exactly.
DriftDensity semicircle_drift(int N);

/// The zero density (no drift correction).
DriftDensity zero_drift();

/// Any density supported in [lower, 0); mass and ∫ρ/x by quadrature, with
/// x = -r² to absorb the 1/√(-x) behaviour at the origin.
DriftDensity make_drift_density(std::string id, int N, std::function<double(double)> rho, double lower);

}  // namespace detproc::kernels

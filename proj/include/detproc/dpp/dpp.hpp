#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "detproc/configuration.hpp"
#include "detproc/kernels/spec.hpp"
#include "detproc/rng.hpp"

namespace detproc::dpp {

struct Interval {
  double lo = 0.0, hi = 0.0;
  double length() const { return hi > lo ? hi - lo : 0.0; }
};

/// Union of intervals; empty intervals contribute no nodes.
using Domain = std::vector<Interval>;

using StaticKernel = std::function<double(double, double)>;

/// Equal-time slice K(t, x; t, y) of any kernel family.
StaticKernel time_slice(const kernels::KernelSpec& spec, double t, const kernels::ConfigQuad& q = {});

/// Quadrature discretization of an integral operator on a domain.
struct DiscretizedOperator {
  Eigen::VectorXd nodes, weights;
  Eigen::MatrixXd kmat;  // K(x_i, x_j), symmetrized
  Domain domain;
  StaticKernel kernel;   // kept for Nyström interpolation in the sampler

  Eigen::Index size() const { return nodes.size(); }
  /// W^{1/2} K W^{1/2}.
  Eigen::MatrixXd symmetric_form() const;
  double trace() const;
};

/// Gauss–Legendre with n_nodes per (nonempty) interval. Kernel failures are
/// rethrown with the offending node pair in the message.
DiscretizedOperator nystrom(StaticKernel K, const Domain& domain, int n_nodes);

/// Eigenvalues of W^{1/2} K W^{1/2}, ascending.
Eigen::VectorXd operator_spectrum(const DiscretizedOperator& op);

/// det(I - z W^{1/2} K W^{1/2}); z = 1 is the gap probability of the domain.
double fredholm_det(const DiscretizedOperator& op, double z);

/// det[K(x_j, x_k)]_{j,k ≤ m}.
double correlation_fn(const StaticKernel& K, std::span<const double> points);

/// A test function χ_t on a bounded support, discretized with GL nodes.
struct TimeSlice {
  double t = 0.0;
  Domain support;
  std::function<double(double)> chi;
};

struct MultitimeResult {
  double value = 1.0;
  double coarse_value = 1.0;  // same with half the nodes per interval
  double self_convergence = 0.0;
  std::optional<std::string> warning;
};

using ExtendedKernel = std::function<double(double, double, double, double)>;

/// Det[δ_{st}δ(x-y) + K(s,x;t,y)χ_t(y)] on the product grid, by LU with
/// partial pivoting. A warning is attached when halving the grid changes the
/// value by more than tol.
MultitimeResult multitime_fredholm(const ExtendedKernel& K, std::span<const TimeSlice> slices, int n_nodes,
                                   double tol = 1e-6);

/// Eigen-decomposition used by the sampler. Eigenfunctions are stored as
/// values at the nodes, orthonormal under the quadrature weights.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // clamped to [0, 1]
  Eigen::MatrixXd phi;          // phi(i, j) = φ_j(x_i)
  Eigen::VectorXd nodes, weights;
  Domain domain;
  StaticKernel kernel;
  double raw_min = 0.0, raw_max = 0.0;  // before clamping

  /// φ_j(x) for arbitrary x by Nyström extension (1/λ_j) Σ_i w_i K(x, x_i) φ_j(x_i).
  Eigen::VectorXd eval(double x, std::span<const Eigen::Index> which) const;
};

/// Throws NumericalError when the spectrum leaves [-tol, 1 + tol].
SpectralDecomposition decompose(const DiscretizedOperator& op, double tol = 1e-8);

/// Bernoulli(λ_j) selection followed by the chain-rule projection sampler with
/// rejection from a uniform proposal on the domain.
Configuration sample(const SpectralDecomposition& sd, SplitMix64& rng);

/// `count` independent samples; sample r uses SplitMix64::stream(seed, r).
std::vector<Configuration> sample_many(const SpectralDecomposition& sd, int count, std::uint64_t seed,
                                       int threads = 0);

struct MomentDiagnostic {
  double empirical = 0.0;  // mean of |η(D) - ρ(D)|^{2k}
  double std_error = 0.0;
  double bound = 0.0;      // (3ρ(D))^k
};

MomentDiagnostic moment_diagnostic(std::span<const Configuration> samples, Interval D, double rho_D, int k);

struct TailFieldRow {
  double L = 0.0;
  double count_deviation = 0.0;  // |ξ([0,L]) - ∫_0^L ρ|
  double tail_field = 0.0;       // ∫_{|x|≥L} (ρ dx - ξ(dx))/x, signed
};

/// ρ is integrated over [support.lo, support.hi] only.
std::vector<TailFieldRow> tail_field_diagnostic(const Configuration& xi, const std::function<double(double)>& rho,
                                                Interval support, std::span<const double> L_grid);

/// Least-squares slope of log y against log x over entries with y > 0.
double fit_exponent(std::span<const double> x, std::span<const double> y);

// I/O

/// First line: the metadata object; then one JSON array of points per sample.
void write_samples(std::ostream& os, const nlohmann::json& meta, std::span<const Configuration> samples);
std::vector<Configuration> read_samples(std::istream& is, nlohmann::json* meta = nullptr);

void write_fredholm_header(std::ostream& os);
void write_fredholm_row(std::ostream& os, double lo, double hi, int n_nodes, double z, double det);

}  // namespace detproc::dpp

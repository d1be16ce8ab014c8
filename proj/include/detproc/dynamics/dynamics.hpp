#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "detproc/kernels/drift.hpp"

namespace detproc::dynamics {

enum class Model { dyson, besq, drifted };
std::string to_string(Model m);

/// All particles at 0. Dyson: exact GUE draw at the first grid time.
/// besq: chGUE draw for integer ν, otherwise the spread ε·(1..N), ε = 1e-6.
struct Origin {};
using Initial = std::variant<Origin, std::vector<double>>;

struct SimParams {
  double dt_max = 1e-3;
  int replicas = 1;
  std::uint64_t seed = 0;
  int threads = 0;           // 0 = hardware
  double gap_factor = 0.1;   // local step ≤ gap_factor · min_gap²
  int max_halvings = 60;
  // RNG streams are keyed by first_replica + r, so a run split into chunks
  // reproduces the unsplit ensemble exactly
  std::uint64_t first_replica = 0;
};

/// R replicas × T times × N particles, stored in (replica, time, particle) order.
struct PathEnsemble {
  int replicas = 0, particles = 0;
  std::vector<double> time_grid;
  std::vector<double> positions;
  Model model = Model::dyson;
  double nu = 0.0;              // besq
  std::string drift_id;         // drifted
  double drift_inv_moment = 0.0;
  std::uint64_t seed = 0;
  double dt_max = 0.0;
  long rejected_steps = 0;      // collision / positivity rejections, all replicas

  std::size_t times() const { return time_grid.size(); }
  double at(int r, std::size_t ti, int j) const {
    return positions[(static_cast<std::size_t>(r) * times() + ti) * particles + j];
  }
  std::span<const double> slice(int r, std::size_t ti) const {
    return {positions.data() + (static_cast<std::size_t>(r) * times() + ti) * particles,
            static_cast<std::size_t>(particles)};
  }
  /// Index of t in the grid; ParameterError when t is not a grid point.
  std::size_t time_index(double t) const;
  /// Slices that are not strictly increasing (or negative, for besq). 0 in
  /// every ensemble the simulators return.
  long violations() const;

  friend bool operator==(const PathEnsemble&, const PathEnsemble&) = default;
};

PathEnsemble simulate_dyson(int N, const Initial& x0, std::span<const double> t_grid, const SimParams& p);
PathEnsemble simulate_besq(int N, double nu, const Initial& x0, std::span<const double> t_grid, const SimParams& p);
/// Dyson paths plus the deterministic shift t²/4 + t ∫ρ̂(x)dx/x.
PathEnsemble simulate_drifted(int N, const Initial& x0, std::span<const double> t_grid, const SimParams& p,
                              const kernels::DriftDensity& drift);

struct Histogram {
  std::vector<double> edges;      // bins + 1
  std::vector<double> density;    // per unit length, mass N summed over bins
  std::vector<double> std_error;
  double outside = 0.0;           // mean number of particles per replica outside the edges
};

/// Range taken from the data, so the histogram carries the full mass N.
Histogram empirical_density(const PathEnsemble& ens, double t, int bins);
Histogram empirical_density(const PathEnsemble& ens, double t, int bins, double lo, double hi);

struct MgfEstimate {
  double estimate = 0.0;
  double std_error = 0.0;  // jackknife
};

/// Mean over replicas of exp Σ_m Σ_j f_m(X_j(t_m)). Throws NumericalError if
/// an exponent is not finite or would overflow.
MgfEstimate empirical_mgf(const PathEnsemble& ens, std::span<const double> times,
                          std::span<const std::function<double(double)>> fs);

enum class ScalingMap { bulk, hard_edge, soft_edge };
struct SpaceTimePoint {
  double t = 0.0, x = 0.0;
};
ScalingMap parse_scaling_map(const std::string& s);
SpaceTimePoint scaling_map(SpaceTimePoint p, ScalingMap map, int N);

// Persistence

/// `<stem>.bin` (header + little-endian float64 positions) and `<stem>.json`.
void save_ensemble(const PathEnsemble& ens, const std::filesystem::path& stem);
PathEnsemble load_ensemble(const std::filesystem::path& bin);
nlohmann::json ensemble_metadata(const PathEnsemble& ens);
/// replica,particle,x rows for one grid time.
void write_slice_csv(std::ostream& os, const PathEnsemble& ens, double t);

}  // namespace detproc::dynamics

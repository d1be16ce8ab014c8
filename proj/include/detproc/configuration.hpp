#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace detproc {

/// Finite point measure on the real line: strictly increasing support
/// points, each carrying a positive integer multiplicity.
class Configuration {
 public:
  Configuration() = default;

  /// Builds from an unsorted list of points; coincident points are merged
  /// into a single support point with the corresponding multiplicity.
  static Configuration from_points(std::vector<double> points);

  /// Builds from explicit (point, multiplicity) pairs; throws DomainError if
  /// points are not strictly increasing or a multiplicity is zero.
  Configuration(std::vector<double> points, std::vector<int> multiplicities);

  std::span<const double> points() const { return points_; }
  std::span<const int> multiplicities() const { return mult_; }

  std::size_t support_size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// ξ(ℝ): number of points counted with multiplicity.
  long total_mass() const;

  /// ξ([lo, hi]) with closed endpoints.
  long count_in(double lo, double hi) const;

  /// True when every multiplicity is 1.
  bool is_simple() const;

  /// Support points with each repeated according to its multiplicity.
  std::vector<double> expanded() const;

  /// τ_a ξ: every point moved by a.
  Configuration translated(double a) const;

  /// ξ ∩ [lo, hi].
  Configuration restricted(double lo, double hi) const;

  /// Sum of two configurations as measures.
  friend Configuration operator+(const Configuration& a, const Configuration& b);

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<double> points_;
  std::vector<int> mult_;
};

}  // namespace detproc

#include "detproc/configuration.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "detproc/error.hpp"

namespace detproc {

Configuration Configuration::from_points(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  Configuration c;
  for (double p : points) {
    if (!c.points_.empty() && c.points_.back() == p) {
      ++c.mult_.back();
    } else {
      c.points_.push_back(p);
      c.mult_.push_back(1);
    }
  }
  return c;
}

Configuration::Configuration(std::vector<double> points, std::vector<int> multiplicities)
    : points_(std::move(points)), mult_(std::move(multiplicities)) {
  if (points_.size() != mult_.size())
    throw DomainError("configuration: points and multiplicities differ in length");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (mult_[i] < 1)
      throw DomainError("configuration: multiplicity must be >= 1 at index " + std::to_string(i));
    if (i > 0 && !(points_[i - 1] < points_[i]))
      throw DomainError("configuration: points must be strictly increasing");
  }
}

long Configuration::total_mass() const {
  return std::accumulate(mult_.begin(), mult_.end(), 0L);
}

long Configuration::count_in(double lo, double hi) const {
  auto first = std::lower_bound(points_.begin(), points_.end(), lo);
  auto last = std::upper_bound(points_.begin(), points_.end(), hi);
  long n = 0;
  for (auto it = first; it < last; ++it) n += mult_[it - points_.begin()];
  return n;
}

bool Configuration::is_simple() const {
  return std::all_of(mult_.begin(), mult_.end(), [](int m) { return m == 1; });
}

std::vector<double> Configuration::expanded() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(total_mass()));
  for (std::size_t i = 0; i < points_.size(); ++i)
    out.insert(out.end(), static_cast<std::size_t>(mult_[i]), points_[i]);
  return out;
}

Configuration Configuration::translated(double a) const {
  Configuration c = *this;
  for (double& p : c.points_) p += a;
  return c;
}

Configuration Configuration::restricted(double lo, double hi) const {
  Configuration c;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] >= lo && points_[i] <= hi) {
      c.points_.push_back(points_[i]);
      c.mult_.push_back(mult_[i]);
    }
  }
  return c;
}

Configuration operator+(const Configuration& a, const Configuration& b) {
  Configuration c;
  std::size_t i = 0, j = 0;
  while (i < a.points_.size() || j < b.points_.size()) {
    if (j == b.points_.size() || (i < a.points_.size() && a.points_[i] < b.points_[j])) {
      c.points_.push_back(a.points_[i]);
      c.mult_.push_back(a.mult_[i]);
      ++i;
    } else if (i == a.points_.size() || b.points_[j] < a.points_[i]) {
      c.points_.push_back(b.points_[j]);
      c.mult_.push_back(b.mult_[j]);
      ++j;
    } else {
      c.points_.push_back(a.points_[i]);
      c.mult_.push_back(a.mult_[i] + b.mult_[j]);
      ++i;
      ++j;
    }
  }
  return c;
}

}  // namespace detproc

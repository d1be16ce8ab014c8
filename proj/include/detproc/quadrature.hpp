#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace detproc::quad {

/// Nodes and weights with ∫ f ≈ Σ w_i f(x_i).
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// n-point Gauss–Legendre rule on [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss–Legendre: `panels` equal subintervals of [a, b], n nodes each.
Rule composite_gauss_legendre(int n, int panels, double a, double b);

/// n-point Gauss–Hermite rule for ∫_ℝ f(x) dx where f carries its own
/// Gaussian decay: weights already include the factor e^{x_i²}.
Rule gauss_hermite_scaled(int n);

/// n-point Gauss–Laguerre rule for ∫_0^∞ f(x) dx where f ~ x^α e^{-x}·poly:
/// weights already include x_i^{-α} e^{x_i}.
Rule gauss_laguerre_scaled(int n, double alpha);

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    k += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
    if (j % 2 == 1) g += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
/// Bisects the segment with the largest error estimate until the total
/// estimate is below max(abs_tol, rel_tol·|value|) or `max_intervals` is hit.
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-12, int max_intervals = 4000) {
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  double total = first.value;
  double err = first.err;
  heap.push(first);
  int n = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && n < max_intervals) {
    auto s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    auto l = detail::gk15(f, s.a, mid);
    auto r = detail::gk15(f, mid, s.b);
    total += l.value + r.value - s.value;
    err += l.err + r.err - s.err;
    heap.push(l);
    heap.push(r);
    ++n;
  }
  // Recompute from the segments to shed accumulated rounding in the running sums.
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().err;
    heap.pop();
  }
  return {v, e, n, e <= std::max(abs_tol, rel_tol * std::abs(v))};
}

/// ∫_a^∞ f via x = a + s/(1-s), s ∈ [0, 1).
template <class F>
Result integrate_to_infinity(F&& f, double a, double abs_tol = 1e-12,
                             double rel_tol = 1e-12, int max_intervals = 4000) {
  auto g = [&f, a](double s) {
    if (s >= 1.0) return 0.0;
    const double om = 1.0 - s;
    const double v = f(a + s / om);
    return std::isfinite(v) ? v / (om * om) : 0.0;
  };
  return integrate(g, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

/// ∫_{-∞}^b f via reflection.
template <class F>
Result integrate_from_minus_infinity(F&& f, double b, double abs_tol = 1e-12,
                                     double rel_tol = 1e-12, int max_intervals = 4000) {
  return integrate_to_infinity([&f](double x) { return f(-x); }, -b, abs_tol, rel_tol,
                               max_intervals);
}

}  // namespace detproc::quad

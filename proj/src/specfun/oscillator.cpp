#include "detproc/specfun/oscillator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "detproc/error.hpp"

namespace detproc::specfun {
namespace {

constexpr double kRescaleAbove = 1e150;

void check_degree(int k, const char* who) {
  if (k < 0) throw DomainError(std::string(who) + ": degree must be >= 0");
  if (k > kMaxOscillatorDegree)
    throw CapacityError(std::string(who) + ": degree " + std::to_string(k) +
                        " exceeds the supported maximum " +
                        std::to_string(kMaxOscillatorDegree));
}

void check_nu(double nu, const char* who) {
  if (!(nu > -1.0)) throw DomainError(std::string(who) + ": nu must be > -1");
}

// Runs a normalized three-term recurrence p_{k+1} = a_k p_k - b_k p_{k-1}
// starting from p_0 = 1, p_1 = a_0, and multiplies every output by the
// weight exp(log_w). The running magnitude is renormalized so the sweep
// neither overflows nor loses the weight to underflow.
template <class Step, class Sink>
void scaled_sweep(int kmax, double log_w, Step step, Sink sink) {
  double prev = 0.0;
  double cur = 1.0;
  double log_scale = log_w;
  for (int k = 0;; ++k) {
    sink(k, cur == 0.0 ? 0.0 : cur * std::exp(log_scale));
    if (k == kmax) break;
    const auto [a, b] = step(k);
    const double next = a * cur - b * prev;
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > kRescaleAbove) {
      prev /= mag;
      cur /= mag;
      log_scale += std::log(mag);
    }
  }
}

double hermite_log_weight(double x) {
  return -0.25 * std::log(std::numbers::pi) - 0.5 * x * x;
}

double laguerre_log_weight(double nu, double x) {
  // x^{ν/2} e^{-x/2} / √Γ(ν+1)
  if (x == 0.0) {
    if (nu == 0.0) return 0.0;
    return nu > 0.0 ? -INFINITY : INFINITY;  // x^{ν/2} blows up for ν < 0
  }
  return 0.5 * nu * std::log(x) - 0.5 * x - 0.5 * std::lgamma(nu + 1.0);
}

}  // namespace

std::vector<double> hermite_phi_table(int kmax, double x) {
  check_degree(kmax, "hermite_phi");
  if (!std::isfinite(x)) throw DomainError("hermite_phi: x must be finite");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  scaled_sweep(
      kmax, hermite_log_weight(x),
      [x](int k) {
        const double kk = k;
        return std::pair{std::sqrt(2.0 / (kk + 1.0)) * x, std::sqrt(kk / (kk + 1.0))};
      },
      [&out](int k, double v) { out[static_cast<std::size_t>(k)] = v; });
  return out;
}

double hermite_phi(int k, double x) {
  check_degree(k, "hermite_phi");
  if (!std::isfinite(x)) throw DomainError("hermite_phi: x must be finite");
  double result = 0.0;
  scaled_sweep(
      k, hermite_log_weight(x),
      [x](int j) {
        const double jj = j;
        return std::pair{std::sqrt(2.0 / (jj + 1.0)) * x, std::sqrt(jj / (jj + 1.0))};
      },
      [&result, k](int j, double v) {
        if (j == k) result = v;
      });
  return result;
}

std::vector<double> laguerre_phi_table(int kmax, double nu, double x) {
  check_degree(kmax, "laguerre_phi");
  check_nu(nu, "laguerre_phi");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("laguerre_phi: x must be finite and >= 0");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  scaled_sweep(
      kmax, laguerre_log_weight(nu, x),
      [nu, x](int k) {
        const double kk = k;
        const double den = std::sqrt((kk + 1.0) * (kk + nu + 1.0));
        return std::pair{(2.0 * kk + 1.0 + nu - x) / den, std::sqrt(kk * (kk + nu)) / den};
      },
      [&out](int k, double v) { out[static_cast<std::size_t>(k)] = v; });
  return out;
}

double laguerre_phi(int k, double nu, double x) {
  check_degree(k, "laguerre_phi");
  check_nu(nu, "laguerre_phi");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("laguerre_phi: x must be finite and >= 0");
  double result = 0.0;
  scaled_sweep(
      k, laguerre_log_weight(nu, x),
      [nu, x](int j) {
        const double jj = j;
        const double den = std::sqrt((jj + 1.0) * (jj + nu + 1.0));
        return std::pair{(2.0 * jj + 1.0 + nu - x) / den, std::sqrt(jj * (jj + nu)) / den};
      },
      [&result, k](int j, double v) {
        if (j == k) result = v;
      });
  return result;
}

void OscillatorIndex::validate() const {
  check_degree(k, "OscillatorIndex");
  if (nu) check_nu(*nu, "OscillatorIndex");
}

double OscillatorIndex::operator()(double x) const {
  return nu ? laguerre_phi(k, *nu, x) : hermite_phi(k, x);
}

}  // namespace detproc::specfun

#pragma once

#include <stdexcept>
#include <string>

namespace detproc {

/// Base of every error thrown by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};

/// Request exceeds a configured precision or size budget.
struct CapacityError : Error {
  explicit CapacityError(const std::string& w) : Error("capacity", w) {}
};

/// A transition kernel was asked for its t = 0 (delta) branch off the diagonal.
struct DistributionalBranchError : Error {
  explicit DistributionalBranchError(const std::string& w)
      : Error("distributional_branch", w) {}
};

/// Quadrature, truncation or sampling failed to reach its tolerance.
struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error("numerical", w) {}
};

/// Input falls between the validity regions of two asymptotic regimes.
struct AmbiguousRegimeError : Error {
  explicit AmbiguousRegimeError(const std::string& w)
      : Error("ambiguous_regime", w) {}
};

/// Malformed parameters (CLI, file formats, ranges of tuning knobs).
struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error("parameter", w) {}
};

/// Configuration outside what an operation supports (e.g. multiple points).
struct UnsupportedConfigurationError : Error {
  explicit UnsupportedConfigurationError(const std::string& w)
      : Error("unsupported_configuration", w) {}
};

/// Sequential sampler produced a marginal density below -1e-9.
struct SamplerInstabilityError : Error {
  explicit SamplerInstabilityError(const std::string& w) : Error("sampler_instability", w) {}
};

/// SDE stepping could not keep particles ordered.
struct SimulationError : Error {
  explicit SimulationError(const std::string& w) : Error("simulation", w) {}
};

}  // namespace detproc

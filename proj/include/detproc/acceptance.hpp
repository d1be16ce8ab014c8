#pragma once

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

namespace detproc::acceptance {

struct Options {
  bool full = true;           // fast: fewer replicas for criterion 9
  bool inject_fault = false;  // negate φ_k, k ≡ 1 mod 4, inside criterion 1
  std::uint64_t seed = 20240611;
  int threads = 0;
};

struct Result {
  std::string id;             // "1" … "14", "5b", "6b"
  std::string name;
  bool pass = false;
  bool informational = false;  // reported, not counted
  std::string summary;         // measured values, one line
  nlohmann::json details;
  double seconds = 0.0;
};

/// Runs every criterion in order; `progress` sees each result as it lands.
std::vector<Result> run(const Options& opt, const std::function<void(const Result&)>& progress = {});

/// "criterion 3  [airy-density] PASS  …  (0.12 s)"
std::string format_line(const Result& r);

bool all_pass(const std::vector<Result>& rs);
nlohmann::json to_json(const std::vector<Result>& rs, const Options& opt);

}  // namespace detproc::acceptance

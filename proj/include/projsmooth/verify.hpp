#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace projsmooth {

enum class VerifyScope { Kernel, Smoothing, Calculus, Bounds, Bundles, Pipeline, All };

VerifyScope parse_verify_scope(const std::string& name);
std::string to_string(VerifyScope scope);

struct CheckResult {
  std::string name;
  std::string scope;
  std::size_t instances = 0;
  double worst = 0.0;      // worst measured value of the checked quantity
  double threshold = 0.0;  // the check passes when worst <= threshold
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Runs the invariant checks of the selected scope with fixed seeds. Failures
// are recorded, never thrown; an exception inside a check marks it failed.
SuiteReport verify_suite(VerifyScope scope);

}  // namespace projsmooth

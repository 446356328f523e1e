#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace spherekit {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;

  nlohmann::json to_json() const;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
  nlohmann::json to_json() const;
};

// Named verification suites, one per claim family:
//   legendre      recurrence vs closed form
//   orthogonality quadrature orthogonality and norms
//   mean-embedding Monte-Carlo mean embedding = b_0
//   feature-map   Gram-path vs moment-path uniformity estimator
//   addition      addition theorem for orders 1 and 2
//   coefficients  closed-form vs quadrature coefficients, RBF bound
//   gradients     analytic vs central finite-difference gradients
//   collapse      moment behavior and MC-MMD decrease under optimization
//   determinism   byte-identical trajectories for a fixed seed
//   scaling       complexity exponents (slow; excluded from "all")
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, std::uint64_t seed);
std::vector<SuiteResult> run_all_suites(std::uint64_t seed);

}  // namespace spherekit

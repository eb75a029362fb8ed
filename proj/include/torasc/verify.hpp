#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace torasc {

struct SuiteResult {
  std::string id;     // "a".."f"
  std::string title;
  bool passed = true;
  double worst = 0;      // largest residual seen, or mismatch count
  double threshold = 0;
  int instances = 0;
  long checks = 0;
  std::string detail;    // first failure, if any
};

// Chart identity, unimodularity and covering, Euler identity, Jacobian,
// quasihomogeneity and max card A(σ) = m over the built-in fixtures plus
// `random_phases` random polynomial phases.
std::vector<SuiteResult> run_property_suites(int random_phases = 20, std::uint64_t seed = 2024);

nlohmann::json to_json(const SuiteResult& r);

}  // namespace torasc

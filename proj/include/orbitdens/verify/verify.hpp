#pragma once

// Acceptance suite shared by the CLI and the acceptance test binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace orbitdens {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;
  double seconds = 0;
};

struct VerifyOptions {
  int horizonK = 7;               // 3..8; below 7 tolerances widen by 8^(7 - horizonK)
  std::vector<std::string> only;  // group names or criterion ids; empty = all
  std::uint64_t seed = 0;
};

/// Groups: density, shifts, regimes, semigroup, properties.
std::vector<int> selectCriteria(const std::vector<std::string>& only);

std::vector<CriterionResult> runVerification(const VerifyOptions& opt,
                                             const std::function<void(const CriterionResult&)>& onResult = {});

/// "PASS [id] title (seconds)" followed by indented details.
std::string formatResult(const CriterionResult& r);

}  // namespace orbitdens

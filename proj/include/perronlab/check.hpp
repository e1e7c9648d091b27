#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace perronlab {

// One named verification result. Informational checks are recorded but do not
// decide the overall outcome.
struct Check {
  std::string name;
  bool passed = false;
  std::optional<double> expected;
  std::optional<double> observed;
  std::optional<double> tolerance;
  bool required = true;
  std::string note;
};

inline bool all_required_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.required; });
}

}  // namespace perronlab

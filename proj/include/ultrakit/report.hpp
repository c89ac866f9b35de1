#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ultrakit {

struct LawViolation {
  std::size_t instance = 0;
  std::string law, witness;
};

struct LawReport {
  std::size_t instances = 0, checks = 0;
  std::vector<LawViolation> violations;
  bool ok() const { return violations.empty(); }

  void check(std::size_t instance, bool ok, const std::string& law, const std::string& witness) {
    ++checks;
    if (!ok) violations.push_back({instance, law, witness});
  }
  void merge(const LawReport& o) {
    instances += o.instances;
    checks += o.checks;
    violations.insert(violations.end(), o.violations.begin(), o.violations.end());
  }
};

}  // namespace ultrakit

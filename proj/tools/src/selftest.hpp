#pragma once

#include <string>
#include <vector>

namespace schurlab::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// A reduced-size pass over the library invariants. Deterministic for a
/// given seed.
std::vector<CheckResult> run_selftest(unsigned long long seed, unsigned threads);

}  // namespace schurlab::cli

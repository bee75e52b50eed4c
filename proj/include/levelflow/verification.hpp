#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "levelflow/spacing_distributions.hpp"

namespace levelflow {

/// One invariant check: passes when `value` is below `threshold`.
struct CheckResult {
  std::string module;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  bool skipped = false;  // not applicable to this family; `note` says why
  std::string note;
  double seconds = 0.0;
};

struct VerificationReport {
  double family_n = 0.0;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::size_t failures() const;
};

/// Invariants of every module for one family. Stochastic checks draw from
/// substreams of `seed` and compare at 3 standard errors or the 1% KS level.
VerificationReport run_verification(const RepulsionFamily& family, std::uint64_t seed);

/// Fixed-width pass/fail table, one line per check.
void print_report(std::ostream& out, const VerificationReport& report);

}  // namespace levelflow

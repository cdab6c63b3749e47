#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rfso::validation {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double elapsed_s = 0.0;
  std::vector<std::string> details;  // one line per sub-check
};

struct Options {
  std::uint64_t seed = 1;
  std::uint64_t trials = 1'000'000;
  /// Bussgang regression draws per IBO point.
  std::uint64_t bussgang_draws = 4'000'000;
};

CheckResult truncation_error(const Options& o);       // 1
CheckResult sampler_fidelity(const Options& o);       // 2
CheckResult outage_three_paths(const Options& o);     // 3
CheckResult validity_and_floors(const Options& o);    // 4
CheckResult diversity_slope(const Options& o);        // 5
CheckResult ber_identities(const Options& o);         // 6
CheckResult capacity_ceilings(const Options& o);      // 7
CheckResult bussgang_arbitration(const Options& o);   // 8
CheckResult determinism(const Options& o);            // 9

/// Runs the criteria listed in ids (all nine when empty).
std::vector<CheckResult> run_all(const Options& o, const std::vector<int>& ids = {});

}  // namespace rfso::validation

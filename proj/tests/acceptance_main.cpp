#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "rfso/validation.hpp"

// Prints one PASS/FAIL line per acceptance criterion, followed by its sub-check details.
// Usage: rfso_acceptance [criterion ids...]
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  rfso::validation::Options opt;
  int failed = 0;
  for (const auto& r : rfso::validation::run_all(opt, ids)) {
    std::printf("criterion %d: %s  %s (%.1f s)\n", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str(), r.elapsed_s);
    for (const auto& d : r.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}

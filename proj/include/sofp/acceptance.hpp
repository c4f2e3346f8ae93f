#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sofp::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 20260811ULL;
  int threads = 0;            // 0: resolve from env / hardware
  std::vector<int> only;      // empty: run all criteria
};

/// Runs the acceptance criteria, printing one pass/fail line per criterion to
/// `log` as results arrive.
std::vector<CriterionResult> run(const Options& options, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace sofp::acceptance

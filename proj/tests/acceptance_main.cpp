// Acceptance suite runner: one pass/fail line per criterion, exit 0 iff all
// pass. Optional arguments select a subset of criterion ids.

#include <cstdlib>
#include <iostream>
#include <string>

#include "sofp/acceptance.hpp"

int main(int argc, char** argv) {
  sofp::acceptance::Options options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      options.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--threads" && i + 1 < argc) {
      options.threads = std::atoi(argv[++i]);
    } else {
      options.only.push_back(std::atoi(arg.c_str()));
    }
  }
  const auto results = sofp::acceptance::run(options, std::cout);
  const bool ok = sofp::acceptance::all_passed(results);
  std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILURES present")
            << std::endl;
  return ok ? 0 : 1;
}

// Runs the ten acceptance criteria and prints one line per criterion.
// Exit status is nonzero when any criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  rlab::verify::SuiteOptions options;
  options.timing = true;
  if (argc > 1) options.seed = std::strtoull(argv[1], nullptr, 10);

  int failed = 0;
  rlab::verify::run_all(options, [&](const rlab::verify::CriterionResult& r) {
    std::cout << rlab::verify::status_line(r) << '\n' << std::flush;
    if (!r.pass) ++failed;
  });
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}

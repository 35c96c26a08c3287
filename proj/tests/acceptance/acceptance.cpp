// Runs the acceptance checks (all of them, or those named on the command
// line) and prints one PASS/FAIL line each. Exit status 1 if any fails.
#include <iostream>
#include <string>
#include <vector>

#include "levylab/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> names(argv + 1, argv + argc);
  if (names.empty()) names = levylab::check_names();
  int failed = 0;
  for (const auto& name : names) {
    const auto result = levylab::run_check(name);
    std::cout << levylab::format_result(result) << std::endl;
    if (!result.pass) ++failed;
  }
  std::cout << (names.size() - failed) << "/" << names.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "renorm/acceptance.hpp"

int main(int argc, char** argv) {
  renorm::acceptance::Options opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  if (argc > 1) opt.goldens = renorm::acceptance::load_goldens(argv[1]);
  const auto report = renorm::acceptance::run(opt);
  std::cout << report.render();
  return report.all_passed() ? EXIT_SUCCESS : EXIT_FAILURE;
}

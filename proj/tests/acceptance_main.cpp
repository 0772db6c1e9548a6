#include <cstdlib>
#include <iostream>

#include "annewton/acceptance.hpp"

int main(int argc, char** argv) {
  annewton::AcceptanceOptions o;
  if (argc > 1) o.out_dir = argv[1];
  if (const char* s = std::getenv("NN_SEED")) o.seed = std::strtoull(s, nullptr, 10);
  const auto report = annewton::run_acceptance(o, std::cout);
  std::cout << (report.all_passed() ? "acceptance: all criteria passed" : "acceptance: FAILED") << '\n';
  return report.all_passed() ? 0 : 1;
}

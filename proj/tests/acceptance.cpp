#include <iostream>

#include "qmem/checks.hpp"

int main() {
  int failures = 0;
  for (int id = 1; id <= 12; ++id) {
    const auto r = qmem::checks::run_criterion(id);
    std::cout << qmem::checks::format_result(r) << std::endl;
    failures += r.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all 12 criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

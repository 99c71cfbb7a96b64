// Runs every acceptance criterion and prints one pass/fail line per criterion.
#include <cstdlib>
#include <iostream>

#include "ageflow/verify.hpp"

int main(int argc, char** argv) {
    int jobs = 0;
    if (argc > 1) jobs = std::atoi(argv[1]);
    auto results = ageflow::run_acceptance("all", jobs);
    int failed = ageflow::print_acceptance(std::cout, results);
    std::cout << (failed == 0 ? "acceptance: all criteria passed"
                              : "acceptance: " + std::to_string(failed) + " criteria FAILED")
              << std::endl;
    return failed == 0 ? 0 : 1;
}

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ageflow {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<std::string> presets;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the verification suite. `preset_filter` restricts to criteria that
/// exercise the named preset ("" or "all" runs everything); `jobs` bounds
/// the worker threads used inside each criterion.
std::vector<CriterionResult> run_acceptance(const std::string& preset_filter = "", int jobs = 0);

/// One pass/fail line per criterion; returns the number of failures.
int print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results);

} // namespace ageflow

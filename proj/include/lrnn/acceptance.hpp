#pragma once

// The acceptance suite behind `lrnn verify` and the acceptance test binary.

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "lrnn/experiments.hpp"

namespace lrnn {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double limit = 0.0;  // runtime budget in seconds, exceeding it fails the criterion
};

struct AcceptanceOptions {
    int jobs = 1;
    std::set<int> only;  // empty runs everything
    std::ostream* log = nullptr;
};

inline constexpr int kCriterionCount = 11;

/// Training protocol of the reduced Lotka-Volterra comparison (criterion 10).
OdeSettings lv_acceptance_settings(int jobs = 1);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  1  title  0.12 s / 5 s  detail", one line per result.
std::string format_line(const CriterionResult& r);
std::string format_table(const std::vector<CriterionResult>& results);

} // namespace lrnn

#pragma once

#include <string>
#include <vector>

namespace swelab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double deviation = 0.0; // measured worst-case deviation
    double tolerance = 0.0;
    std::string detail;
};

/// Runs the closed-form-vs-oracle suite for each beta plus the scalar
/// Gaussian identity checks. Deterministic; safe to run repeatedly.
std::vector<CheckResult> run_selftest(const std::vector<double>& betas);

} // namespace swelab

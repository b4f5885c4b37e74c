// Config-driven invariant suites behind the `verify` command. Each check
// produces one row (suite, check, measured value, tolerance, pass); a value
// below its tolerance passes. Suites draw randomness from one generator
// seeded by the config, so a rerun with the same config is bit-identical.

#pragma once

#include <string>
#include <vector>

#include "fraclab/config.hpp"

namespace fraclab {

struct VerifyCheck {
    std::string suite;
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const;
    bool empty() const { return checks.empty(); }
};

VerifyReport run_verify(const ExperimentConfig& config);

} // namespace fraclab

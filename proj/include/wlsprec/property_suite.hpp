#pragma once

// Randomized verification of the spectral bounds over seeded instances.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wlsprec {

struct CheckTally {
    std::string name;
    std::size_t applicable = 0;
    std::size_t passed = 0;
    std::optional<std::string> firstFailure;  // reproduction line

    bool ok() const { return passed == applicable; }
};

struct SuiteSummary {
    std::vector<CheckTally> checks;
    // max over instances of (max|λ − 1| − r)/r; negative means every
    // eigenvalue sits strictly inside its ball.
    double worstSlack = -1.0;

    bool ok() const;
};

struct SuiteOptions {
    std::size_t count = 1000;
    std::size_t maxDim = 12;
    std::uint64_t seed = 42;
    double radiusScale = 1.0;
    std::size_t maxLayoutN = 4;
    std::size_t maxLayoutWindows = 6;
};

/// Runs, per instance index: ball containment, positivity and the condition
/// bound on a random weighted problem; the variational bracket of κ(D, C) on a
/// random SPD pair; and the block error formula, ρ norm bound and background
/// containment on a random 4D-Var layout (variant cycling zero/identity/custom).
SuiteSummary run_property_suite(const SuiteOptions& options);

} // namespace wlsprec

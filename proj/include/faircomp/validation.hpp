#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "faircomp/experiments.hpp"

namespace faircomp {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Strictly feasible positions with random slacks; uses at most 98% of the
/// free aperture so every slack stays bounded away from zero.
AntennaPositions random_feasible_positions(const SystemConfig& config, Rng& rng);

/// Circularly symmetric complex Gaussian vector with E|v_i|^2 = variance.
CVec random_complex(Eigen::Index size, Rng& rng, double variance = 1.0);

/// Runs the oracle suite (Monte-Carlo vs closed form, brute-force subproblem
/// searches, finite-difference gradients, BCD monotonicity). Each finished
/// check is passed to `on_result` as it completes.
std::vector<CheckResult> run_validation(std::uint64_t seed,
                                        const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace faircomp

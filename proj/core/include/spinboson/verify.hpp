#pragma once

#include <string>
#include <vector>

namespace spinboson {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

struct VerifyOptions {
    long factorization_draws = 1000;
    long covariance_samples = 200000;
    // Test hook: additive perturbation injected into one entry of the
    // quantum noise factor before the consistency check, to demonstrate
    // that the check detects a wrong factor.
    double perturb_quantum_factor = 0.0;
};

// Deterministic self-checks of the stochastic machinery: noise-factor /
// diffusion consistency, sampled noise covariance, operator identity
// residuals, drift conjugacy, monitor conservation, and the driven
// two-site steady-state benchmark.
std::vector<CheckResult> run_verification_suite(const VerifyOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

} // namespace spinboson

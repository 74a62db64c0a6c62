#pragma once

#include <string>
#include <vector>

namespace nsstab {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct BatteryOptions {
    int threads = 1;
    /// Debug hook: corrupt the viscosity sign inside the Taylor-Green check
    /// so the failure path of the battery can be exercised.
    bool negate_nu = false;
};

/// The built-in verification battery at 32^3: analytic decay, energy
/// identities and their convergence order, skew-symmetry, 2D invariance,
/// budget vanishing, the bootstrap/Groenwall batch, inequality-ratio
/// stability, and determinism. Returns one result per check.
std::vector<CheckResult> run_battery(const BatteryOptions& opts);

/// The same computations keyed to the numbered acceptance criteria (1..10).
std::vector<CheckResult> run_acceptance_criteria(const BatteryOptions& opts);

}  // namespace nsstab

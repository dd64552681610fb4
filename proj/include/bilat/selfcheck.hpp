#pragma once

#include <string>
#include <vector>

namespace bilat {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;      // largest observed deviation
    double tolerance = 0.0;
};

/// Runs a fast subset of the library invariants (SO(3) identities, dynamics
/// consistency, pseudoinverse identity, controller decoupling) on seeded
/// random samples of the bundled arm.
std::vector<CheckResult> run_self_check(unsigned seed = 7);

}  // namespace bilat

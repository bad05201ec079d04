#pragma once

#include <string>
#include <vector>

#include "hermspde/experiments.hpp"

namespace hermspde {

/// Outcome of one acceptance criterion: every part carries its measured
/// value and the tolerance it was judged against, so pass/fail is derivable
/// from the record alone.
struct AcceptanceResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double runtime_limit = 0.0;  // 0 = no limit
    std::vector<CheckItem> parts;

    std::string summary() const;  // one printable pass/fail line
};

AcceptanceResult acceptance_route_equivalence();       // 1
AcceptanceResult acceptance_picard_decay();            // 2
AcceptanceResult acceptance_heat_representation();     // 3
AcceptanceResult acceptance_monotonicity_stability();  // 4
AcceptanceResult acceptance_adjoint_defect();          // 5
AcceptanceResult acceptance_explosion();               // 6
AcceptanceResult acceptance_feynman_kac();             // 7
AcceptanceResult acceptance_mollifier();               // 8
AcceptanceResult acceptance_flow_duality_fourier();    // 9
AcceptanceResult acceptance_weak_null();               // 10

/// Runs the requested criteria (all ten when `only` is empty) in order.
std::vector<AcceptanceResult> run_acceptance(const std::vector<int>& only = {});

}  // namespace hermspde

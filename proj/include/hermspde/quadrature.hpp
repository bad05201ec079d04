#pragma once

#include <vector>

namespace hermspde {

/// Gauss rule for the weight e^{-x^2} on the real line: integrates
/// polynomials of degree <= 2*order - 1 exactly against the weight.
struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // positive, sum = sqrt(pi)
};

/// Golub-Welsch construction: eigenvalues of the Jacobi matrix give the
/// nodes, squared first eigenvector components (times sqrt(pi)) the weights.
/// Deterministic for fixed Q. Throws for Q < 1.
QuadratureRule gauss_hermite_rule(int Q);

/// Shared cache keyed by order; thread-safe, idempotent population.
const QuadratureRule& cached_gauss_hermite(int Q);

}  // namespace hermspde

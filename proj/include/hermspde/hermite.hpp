#pragma once

#include <vector>

#include "hermspde/multi_index.hpp"

namespace hermspde {

/// Three-term recurrence for the L^2-orthonormal Hermite functions,
/// started from an arbitrary seed value:
///
///   v[0] = seed,  v[1] = sqrt(2) x v[0],
///   v[m+1] = x sqrt(2/(m+1)) v[m] - sqrt(m/(m+1)) v[m-1].
///
/// With seed = pi^{-1/4} e^{-x^2/2} this returns the Hermite functions
/// h_m(x) themselves, Gaussian factor included. Passing a rescaled seed
/// yields h_m(x) * e^s without ever forming the polynomial and Gaussian
/// parts separately; translation and pairing kernels use this to keep
/// exponents representable at large shifts.
std::vector<double> hermite_seeded(double x, int max_degree, double seed);

/// h_0..h_max at x (one-dimensional, orthonormal in L^2(R)).
std::vector<double> hermite_values(double x, int max_degree);

/// Tensorized Hermite function h_k(x) = prod_i h_{k_i}(x_i).
double hermite_eval(const MultiIndex& k, const std::vector<double>& x);

}  // namespace hermspde

#include "hermspde/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace hermspde {

std::vector<double> hermite_seeded(double x, int max_degree, double seed) {
    if (max_degree < 0) throw std::invalid_argument("hermite_seeded: negative degree");
    std::vector<double> v(static_cast<std::size_t>(max_degree) + 1);
    v[0] = seed;
    if (max_degree == 0) return v;
    v[1] = std::sqrt(2.0) * x * v[0];
    for (int m = 1; m < max_degree; ++m) {
        v[m + 1] = x * std::sqrt(2.0 / (m + 1)) * v[m] -
                   std::sqrt(static_cast<double>(m) / (m + 1)) * v[m - 1];
    }
    return v;
}

std::vector<double> hermite_values(double x, int max_degree) {
    const double seed = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    return hermite_seeded(x, max_degree, seed);
}

double hermite_eval(const MultiIndex& k, const std::vector<double>& x) {
    if (k.size() != x.size()) throw std::invalid_argument("hermite_eval: dimension mismatch");
    double prod = 1.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < 0) throw std::invalid_argument("hermite_eval: negative index entry");
        prod *= hermite_values(x[i], k[i])[k[i]];
    }
    return prod;
}

}  // namespace hermspde

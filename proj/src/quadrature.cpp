#include "hermspde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace hermspde {

namespace {

// Eigenvalues of a symmetric tridiagonal matrix (diag d, subdiag e) by QL
// with implicit shifts, accumulating only the first row of the eigenvector
// matrix in z. O(n^2), which keeps high-order rules cheap.
void tridiag_ql_first_row(std::vector<double>& d, std::vector<double>& e,
                          std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return;
    e.push_back(0.0);  // sentinel e[n-1]
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("tridiagonal QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    double zf = z[i + 1];
                    z[i + 1] = s * z[i] + c * zf;
                    z[i] = c * z[i] - s * zf;
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    e.pop_back();
}

}  // namespace

QuadratureRule gauss_hermite_rule(int Q) {
    if (Q < 1) throw std::invalid_argument("gauss_hermite_rule: order must be >= 1");
    const double mu0 = std::sqrt(M_PI);  // integral of the weight e^{-x^2}

    std::vector<double> diag(Q, 0.0);
    std::vector<double> sub(Q > 1 ? Q - 1 : 0);
    for (int k = 1; k < Q; ++k) sub[k - 1] = std::sqrt(0.5 * k);
    std::vector<double> z(Q, 0.0);
    z[0] = 1.0;

    tridiag_ql_first_row(diag, sub, z);

    std::vector<int> perm(Q);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) { return diag[a] < diag[b]; });

    QuadratureRule rule;
    rule.order = Q;
    rule.nodes.resize(Q);
    rule.weights.resize(Q);
    for (int i = 0; i < Q; ++i) {
        rule.nodes[i] = diag[perm[i]];
        rule.weights[i] = mu0 * z[perm[i]] * z[perm[i]];
    }
    return rule;
}

const QuadratureRule& cached_gauss_hermite(int Q) {
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[Q];
    if (!slot) slot = std::make_unique<QuadratureRule>(gauss_hermite_rule(Q));
    return *slot;
}

}  // namespace hermspde

#include "hermspde/translation.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "hermspde/hermite.hpp"
#include "hermspde/operator_bundle.hpp"
#include "hermspde/quadrature.hpp"

namespace hermspde {

namespace {

double euclidean_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double xi : x) {
        if (!std::isfinite(xi)) throw std::invalid_argument("translate: non-finite shift");
        s += xi * xi;
    }
    return std::sqrt(s);
}

bool is_zero(const std::vector<double>& x) {
    for (double xi : x)
        if (xi != 0.0) return false;
    return true;
}

void check_shift(const SpectralElement& u, const std::vector<double>& x, double x_max) {
    if (static_cast<int>(x.size()) != u.scheme()->dimension())
        throw std::invalid_argument("translate: shift has wrong dimension");
    if (u.is_complex()) throw std::invalid_argument("translate: real elements expected");
    if (euclidean_norm(x) > x_max)
        throw std::invalid_argument("translate: |x| exceeds the configured guard");
}

// Per-axis tables of h_m(v_i -+ x_a/2) * e^{s} at the quadrature nodes, with
// the flat seed pi^{-1/4} e^{-x_a^2/8}. The per-node product of a "minus" and
// a "plus" value times the raw weight is exactly w_i h_j(v_i - x_a/2)
// h_k(v_i + x_a/2) e^{v_i^2}: the Gaussian bookkeeping cancels analytically.
struct AxisTables {
    std::vector<std::vector<double>> minus;  // [node][degree]
    std::vector<std::vector<double>> plus;
};

AxisTables build_axis_tables(const QuadratureRule& rule, double shift, int N) {
    AxisTables t;
    const int Q = rule.order;
    t.minus.resize(Q);
    t.plus.resize(Q);
    const double seed = std::pow(M_PI, -0.25) * std::exp(-shift * shift / 8.0);
    for (int i = 0; i < Q; ++i) {
        t.minus[i] = hermite_seeded(rule.nodes[i] - 0.5 * shift, N, seed);
        t.plus[i] = hermite_seeded(rule.nodes[i] + 0.5 * shift, N, seed);
    }
    return t;
}

// Shared tensor-node loop for the translate/pairing kernels. Calls
// visit(weight_product, digits) for every tensor node.
template <typename Visit>
void for_each_node(const QuadratureRule& rule, int d, Visit&& visit) {
    std::vector<int> digit(d, 0);
    while (true) {
        double wprod = 1.0;
        for (int a = 0; a < d; ++a) wprod *= rule.weights[digit[a]];
        visit(wprod, digit);
        int axis = 0;
        while (axis < d && ++digit[axis] == rule.order) digit[axis++] = 0;
        if (axis == d) break;
    }
}

SpectralElement translate_quadrature(const SpectralElement& u, const std::vector<double>& x) {
    const auto& scheme = *u.scheme();
    const int d = scheme.dimension();
    const int N = scheme.degree_bound();
    const int Q = translation_quadrature_order(N, euclidean_norm(x));
    const QuadratureRule& rule = cached_gauss_hermite(Q);

    std::vector<AxisTables> tables(d);
    for (int a = 0; a < d; ++a) tables[a] = build_axis_tables(rule, x[a], N);

    Eigen::VectorXd out = Eigen::VectorXd::Zero(scheme.size());
    for_each_node(rule, d, [&](double wprod, const std::vector<int>& digit) {
        double uval = 0.0;  // u at the shifted node, from the "minus" tables
        for (int i = 0; i < scheme.size(); ++i) {
            const MultiIndex& k = scheme.index(i);
            double prod = u.coeffs()[i];
            for (int a = 0; a < d; ++a) prod *= tables[a].minus[digit[a]][k[a]];
            uval += prod;
        }
        const double base = wprod * uval;
        for (int i = 0; i < scheme.size(); ++i) {
            const MultiIndex& k = scheme.index(i);
            double prod = base;
            for (int a = 0; a < d; ++a) prod *= tables[a].plus[digit[a]][k[a]];
            out[i] += prod;
        }
    });
    return SpectralElement(u.scheme(), std::move(out));
}

SpectralElement translate_exponential(const SpectralElement& u, const std::vector<double>& x,
                                      int pad) {
    const auto& scheme = *u.scheme();
    const int d = scheme.dimension();
    auto padded = make_scheme(d, scheme.degree_bound() + pad);
    auto bundle = shared_bundle(padded);

    Eigen::VectorXd cpad = Eigen::VectorXd::Zero(padded->size());
    for (int i = 0; i < scheme.size(); ++i)
        cpad[padded->position(scheme.index(i))] = u.coeffs()[i];

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(padded->size(), padded->size());
    for (int a = 0; a < d; ++a) M -= x[a] * Eigen::MatrixXd(bundle->derivative(a));
    const Eigen::VectorXd moved = M.exp() * cpad;

    Eigen::VectorXd out(scheme.size());
    for (int i = 0; i < scheme.size(); ++i) out[i] = moved[padded->position(scheme.index(i))];
    return SpectralElement(u.scheme(), std::move(out));
}

}  // namespace

int translation_quadrature_order(int N, double x_norm) {
    return N + 8 + static_cast<int>(std::ceil(x_norm * x_norm));
}

SpectralElement translate(const SpectralElement& u, const std::vector<double>& x,
                          const TranslationOptions& opts) {
    check_shift(u, x, opts.x_max);
    if (is_zero(x)) return u;
    switch (opts.method) {
        case TranslationMethod::quadrature:
            return translate_quadrature(u, x);
        case TranslationMethod::exponential:
            return translate_exponential(u, x, opts.pad);
    }
    throw std::logic_error("translate: unknown method");
}

double translate_pairing(const SpectralElement& w, const SpectralElement& u,
                         const std::vector<double>& z) {
    require_same_scheme(w, u);
    check_shift(u, z, 1e308);
    const auto& scheme = *u.scheme();
    const int d = scheme.dimension();
    const int N = scheme.degree_bound();
    const int Q = translation_quadrature_order(N, euclidean_norm(z));
    const QuadratureRule& rule = cached_gauss_hermite(Q);

    std::vector<AxisTables> tables(d);
    for (int a = 0; a < d; ++a) tables[a] = build_axis_tables(rule, z[a], N);

    double total = 0.0;
    for_each_node(rule, d, [&](double wprod, const std::vector<int>& digit) {
        double uval = 0.0, wval = 0.0;
        for (int i = 0; i < scheme.size(); ++i) {
            const MultiIndex& k = scheme.index(i);
            double pm = 1.0, pp = 1.0;
            for (int a = 0; a < d; ++a) {
                pm *= tables[a].minus[digit[a]][k[a]];
                pp *= tables[a].plus[digit[a]][k[a]];
            }
            uval += u.coeffs()[i] * pm;
            wval += w.coeffs()[i] * pp;
        }
        total += wprod * uval * wval;
    });
    return total;
}

}  // namespace hermspde

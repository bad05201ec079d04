#include "hermspde/operators.hpp"

namespace hermspde {

std::vector<SpectralElement> bilinear_A0(const OperatorBundle& ops, const Eigen::MatrixXd& sigma,
                                         const SpectralElement& phi) {
    const int d = static_cast<int>(sigma.rows());
    const int n = static_cast<int>(sigma.cols());
    std::vector<SpectralElement> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(phi.size());
        for (int k = 0; k < d; ++k) c -= sigma(k, i) * (ops.derivative(k) * phi.coeffs());
        out.emplace_back(phi.scheme(), std::move(c));
    }
    return out;
}

SpectralElement bilinear_L1(const OperatorBundle& ops, const Eigen::VectorXd& b,
                            const SpectralElement& phi) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(phi.size());
    for (int i = 0; i < b.size(); ++i) c -= b[i] * (ops.derivative(i) * phi.coeffs());
    return SpectralElement(phi.scheme(), std::move(c));
}

SpectralElement bilinear_L2(const OperatorBundle& ops, const Eigen::MatrixXd& a,
                            const SpectralElement& phi) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(phi.size());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            c += 0.5 * a(i, j) * (ops.second_derivative(i, j) * phi.coeffs());
    return SpectralElement(phi.scheme(), std::move(c));
}

FrozenResult apply_frozen(const Coefficients& at_freeze, const SpectralElement& psi) {
    auto ops = shared_bundle(psi.scheme());
    FrozenResult out{bilinear_L2(*ops, at_freeze.a, psi) + bilinear_L1(*ops, at_freeze.b, psi),
                     bilinear_A0(*ops, at_freeze.sigma, psi)};
    return out;
}

FrozenResult apply_frozen(const CoefficientField& field, const SpectralElement& phi_freeze,
                          const SpectralElement& psi) {
    require_same_scheme(phi_freeze, psi);
    return apply_frozen(field.eval(phi_freeze), psi);
}

std::vector<SpectralElement> apply_A(const CoefficientField& field, const SpectralElement& phi) {
    return apply_frozen(field, phi, phi).A;
}

SpectralElement apply_L(const CoefficientField& field, const SpectralElement& phi) {
    return apply_frozen(field, phi, phi).L;
}

double hs_norm_sq(const std::vector<SpectralElement>& A, RegularityIndex q) {
    double s = 0.0;
    for (const auto& Ai : A) {
        const double norm = sobolev_norm(Ai, q);
        s += norm * norm;
    }
    return s;
}

MonotonicityValue monotonicity_form(const CoefficientField& field, const SpectralElement& phi,
                                    const SpectralElement& psi, RegularityIndex q) {
    const FrozenResult Fphi = apply_frozen(field, phi, phi);
    const FrozenResult Fpsi = apply_frozen(field, psi, psi);
    const SpectralElement diff = phi - psi;

    MonotonicityValue v;
    v.form = 2.0 * weighted_inner(diff, Fphi.L - Fpsi.L, q);
    for (std::size_t i = 0; i < Fphi.A.size(); ++i) {
        const double norm = sobolev_norm(Fphi.A[i] - Fpsi.A[i], q);
        v.form += norm * norm;
    }
    const double dist = sobolev_norm(diff, q);
    v.dist2 = dist * dist;
    v.ratio = v.dist2 > 0.0 ? v.form / v.dist2 : 0.0;
    return v;
}

MonotonicityVariantValue monotonicity_form_variant(const CoefficientField& field,
                                                   const SpectralElement& phi1,
                                                   const SpectralElement& phi2,
                                                   const SpectralElement& phi3, RegularityIndex q,
                                                   double C1) {
    const FrozenResult F32 = apply_frozen(field, phi3, phi2);
    const FrozenResult F21 = apply_frozen(field, phi2, phi1);
    const SpectralElement diff = phi2 - phi1;

    MonotonicityVariantValue v;
    v.form = 2.0 * weighted_inner(diff, F32.L - F21.L, q);
    for (std::size_t i = 0; i < F32.A.size(); ++i) {
        const double norm = sobolev_norm(F32.A[i] - F21.A[i], q);
        v.form += norm * norm;
    }
    const double d21 = sobolev_norm(diff, q);
    const double d23 = sobolev_norm(phi2 - phi3, q);
    v.comparator = C1 * (d21 * d21 + d23 * d23);
    return v;
}

}  // namespace hermspde

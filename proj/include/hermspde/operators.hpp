#pragma once

#include <vector>

#include "hermspde/coefficient_field.hpp"
#include "hermspde/operator_bundle.hpp"
#include "hermspde/spectral_element.hpp"

namespace hermspde {

/// Entrywise coefficient evaluation at phi; also returns a = sigma sigma^t.
inline Coefficients eval_coefficients(const CoefficientField& field, const SpectralElement& phi) {
    return field.eval(phi);
}

/// Bilinear pieces with the coefficients frozen to plain numbers:
///   A_0(sigma, phi) e_i = -sum_k sigma_ki d_k phi      (n elements)
///   L_1(b, phi)         = -sum_i b_i d_i phi
///   L_2(a, phi)         = 1/2 sum_ij a_ij d2_ij phi
std::vector<SpectralElement> bilinear_A0(const OperatorBundle& ops, const Eigen::MatrixXd& sigma,
                                         const SpectralElement& phi);
SpectralElement bilinear_L1(const OperatorBundle& ops, const Eigen::VectorXd& b,
                            const SpectralElement& phi);
SpectralElement bilinear_L2(const OperatorBundle& ops, const Eigen::MatrixXd& a,
                            const SpectralElement& phi);

struct FrozenResult {
    SpectralElement L;               // L(phi_freeze, psi)
    std::vector<SpectralElement> A;  // A_i(phi_freeze, psi), i = 1..n
};

/// Coefficients evaluated at phi_freeze, derivatives applied to psi;
/// apply_frozen(field, phi, phi) realizes (apply_L, apply_A) exactly.
FrozenResult apply_frozen(const CoefficientField& field, const SpectralElement& phi_freeze,
                          const SpectralElement& psi);
FrozenResult apply_frozen(const Coefficients& at_freeze, const SpectralElement& psi);

/// A_i(phi) = -sum_k sigma_ki(phi) d_k phi.
std::vector<SpectralElement> apply_A(const CoefficientField& field, const SpectralElement& phi);

/// L(phi) = 1/2 sum_ij a_ij(phi) d2_ij phi - sum_i b_i(phi) d_i phi.
SpectralElement apply_L(const CoefficientField& field, const SpectralElement& phi);

/// sum_i ||A_i||_q^2 (the squared Hilbert-Schmidt norm over noise directions).
double hs_norm_sq(const std::vector<SpectralElement>& A, RegularityIndex q);

struct MonotonicityValue {
    double form = 0.0;   // 2<phi-psi, L(phi)-L(psi)>_q + ||A(phi)-A(psi)||^2_HS(q)
    double dist2 = 0.0;  // ||phi-psi||_q^2
    double ratio = 0.0;  // form / dist2, zero-guarded at phi = psi
};

MonotonicityValue monotonicity_form(const CoefficientField& field, const SpectralElement& phi,
                                    const SpectralElement& psi, RegularityIndex q);

struct MonotonicityVariantValue {
    double form = 0.0;        // 2<p2-p1, L(p3,p2)-L(p2,p1)>_q + sum ||A_i(p3,p2)-A_i(p2,p1)||_q^2
    double comparator = 0.0;  // C1 (||p2-p1||_q^2 + ||p2-p3||_q^2)
};

MonotonicityVariantValue monotonicity_form_variant(const CoefficientField& field,
                                                   const SpectralElement& phi1,
                                                   const SpectralElement& phi2,
                                                   const SpectralElement& phi3, RegularityIndex q,
                                                   double C1);

}  // namespace hermspde

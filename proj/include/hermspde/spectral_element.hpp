#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hermspde/multi_index.hpp"

namespace hermspde {

/// Regularity exponent p of the Hermite-Sobolev scale S_p (may be negative).
struct RegularityIndex {
    double p = 0.0;
    RegularityIndex() = default;
    explicit RegularityIndex(double value) : p(value) {}
};

/// Truncated Hermite-coefficient representation of an element of S_p (or
/// S_{-p}). Coefficients are always stored in the unweighted L^2 basis,
/// c_k = <f, h_k>_0, so one representation serves every regularity index;
/// all p-dependence lives in the norm weights. An optional imaginary part
/// carries complexified elements (Fourier transforms).
class SpectralElement {
public:
    SpectralElement() = default;
    explicit SpectralElement(SchemePtr scheme);
    SpectralElement(SchemePtr scheme, Eigen::VectorXd coeffs);
    SpectralElement(SchemePtr scheme, Eigen::VectorXd re, Eigen::VectorXd im);

    const SchemePtr& scheme() const { return scheme_; }
    int size() const { return static_cast<int>(re_.size()); }
    bool is_complex() const { return im_.size() > 0; }

    const Eigen::VectorXd& coeffs() const { return re_; }
    const Eigen::VectorXd& imag_coeffs() const;

    double coeff(const MultiIndex& k) const { return re_[scheme_->position(k)]; }

    SpectralElement& operator+=(const SpectralElement& other);
    SpectralElement& operator-=(const SpectralElement& other);
    SpectralElement& operator*=(double c);
    friend SpectralElement operator+(SpectralElement a, const SpectralElement& b) { return a += b; }
    friend SpectralElement operator-(SpectralElement a, const SpectralElement& b) { return a -= b; }
    friend SpectralElement operator*(double c, SpectralElement a) { return a *= c; }

private:
    void check_finite() const;

    SchemePtr scheme_;
    Eigen::VectorXd re_;
    Eigen::VectorXd im_;  // empty for real elements
};

void require_same_scheme(const SpectralElement& a, const SpectralElement& b);

/// Unit coefficient at multi-index k.
SpectralElement basis_element(const SchemePtr& scheme, const MultiIndex& k);

/// ||u||_p = sqrt( sum_k (2|k|+d)^{2p} |c_k|^2 ).
double sobolev_norm(const SpectralElement& u, RegularityIndex p);

/// <u, v> = sum_k c_k(u) c_k(v); the S_p / S_{-p} duality, independent of p.
double dual_pairing(const SpectralElement& u, const SpectralElement& v);

/// Weighted inner product <u, v>_q = sum_k (2|k|+d)^{2q} c_k(u) c_k(v).
double weighted_inner(const SpectralElement& u, const SpectralElement& v, RegularityIndex q);

/// Truncated expansion of the Dirac delta at x: c_k = h_k(x).
SpectralElement delta_element(const std::vector<double>& x, const SchemePtr& scheme);

/// Pointwise reading u(x) = sum_k c_k h_k(x) = <delta_x, u>.
double evaluate(const SpectralElement& u, const std::vector<double>& x);
std::complex<double> evaluate_complex(const SpectralElement& u, const std::vector<double>& x);

/// Coefficient-wise multiplication by (-i)^{|k|}; the Hermite functions are
/// eigenfunctions of the unitary Fourier transform. Applying it four times
/// is the identity.
SpectralElement fourier_transform(const SpectralElement& u);

/// L^2 projection onto Gamma_N by Gauss-Hermite quadrature of order Q
/// per axis (Q >= N+2 required; the module default is N+8). Non-finite
/// samples are rejected with the offending node in the message.
SpectralElement project_function(const std::function<double(const std::vector<double>&)>& f,
                                 const SchemePtr& scheme, int Q);
SpectralElement project_function(const std::function<double(const std::vector<double>&)>& f,
                                 const SchemePtr& scheme);

/// Truncation-tail diagnostic: sum of c_k^2 over the outermost shell |k| = N.
double tail_mass(const SpectralElement& u);

/// JSON round-trip, schema {d, N, ordering:"grlex", coeffs:[...]} with
/// 17-significant-digit number formatting.
std::string element_to_json(const SpectralElement& u);
SpectralElement element_from_json(const std::string& text);

}  // namespace hermspde

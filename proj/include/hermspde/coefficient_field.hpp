#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hermspde/spectral_element.hpp"

namespace hermspde {

/// Scalar post-map g(s) = offset + scale * f(inner * s) with f one of a few
/// 1-Lipschitz primitives; wraps the raw functional value so fields like
/// 0.3 + 0.1 tanh<phi, e_0> are expressible.
struct ScalarMap {
    enum class Fn { identity, tanh, sin, cos };
    Fn fn = Fn::identity;
    double offset = 0.0;
    double scale = 1.0;
    double inner = 1.0;

    double operator()(double s) const;
    double lipschitz() const { return std::abs(scale * inner); }
    bool is_bounded() const { return fn != Fn::identity; }

    static ScalarMap identity_map() { return {}; }
    static ScalarMap affine(double offset, double scale);
    static ScalarMap wrapped(Fn fn, double offset, double scale, double inner = 1.0);
};

/// One functional sigma_ij or b_i : S_p -> R. Four variants:
///   Constant(c)            phi |-> c
///   DualPairing(w, g)      phi |-> g(<w, phi>)
///   PointEval(x0, g)       phi |-> g(phi(x0))
///   NormFunctional(q', g)  phi |-> g(||phi||_q')
class CoefficientEntry {
public:
    enum class Kind { constant, dual_pairing, point_eval, norm_functional };

    static CoefficientEntry constant(double c);
    static CoefficientEntry dual_pairing(SpectralElement w, ScalarMap g = {});
    static CoefficientEntry point_eval(std::vector<double> x0, ScalarMap g = {});
    static CoefficientEntry norm_functional(double q, ScalarMap g = {});

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::constant; }

    double operator()(const SpectralElement& phi) const;

    /// Value at phi = tau_z(y) through the direct kernels: the pairing
    /// integral for DualPairing, the point shift for PointEval; only
    /// NormFunctional materializes the translate.
    double at_translate(const SpectralElement& y, const Eigen::VectorXd& z) const;

    /// Sharp Lipschitz constant w.r.t. ||.||_q on the truncated space:
    /// ||w||_{-q} for pairings, Lip(g) ||delta_{x0}||_{-q} for point
    /// evaluations, Lip(g) times the worst weight ratio for norm functionals.
    double lipschitz(RegularityIndex q, const SchemePtr& scheme) const;

    /// sup |entry| over the ball B_p(0, lambda).
    double bound(double lambda, RegularityIndex p, const SchemePtr& scheme) const;

    double constant_value() const { return value_; }
    const SpectralElement& pairing_element() const { return *w_; }
    const std::vector<double>& eval_point() const { return x0_; }
    double norm_index() const { return norm_q_; }
    const ScalarMap& post_map() const { return g_; }

private:
    Kind kind_ = Kind::constant;
    double value_ = 0.0;
    std::optional<SpectralElement> w_;
    std::vector<double> x0_;
    double norm_q_ = 0.0;
    ScalarMap g_;
};

/// Evaluated coefficients at one state: sigma (d x n), b (d) and
/// a = sigma sigma^t.
struct Coefficients {
    Eigen::MatrixXd sigma;
    Eigen::VectorXd b;
    Eigen::MatrixXd a;
};

/// The functional coefficients sigma_ij : S_p -> R (i < d, j < n) and
/// b_i : S_p -> R, with declared or derived bound K_1(lambda) and Lipschitz
/// constant K(lambda).
class CoefficientField {
public:
    CoefficientField(std::vector<std::vector<CoefficientEntry>> sigma,
                     std::vector<CoefficientEntry> b);

    int state_dim() const { return d_; }
    int noise_dim() const { return n_; }

    const CoefficientEntry& sigma_entry(int i, int j) const { return sigma_[i][j]; }
    const CoefficientEntry& b_entry(int i) const { return b_[i]; }

    Coefficients eval(const SpectralElement& phi) const;
    Coefficients eval_translate(const SpectralElement& y, const Eigen::VectorXd& z) const;

    bool is_constant() const;

    /// K(lambda): max entry Lipschitz constant (lambda enters only through
    /// declared overrides; the four entry kinds are globally Lipschitz on
    /// the truncated space).
    double lipschitz_constant(RegularityIndex q, const SchemePtr& scheme) const;

    /// K_1(lambda) = max_{ij} sup_{||phi||_p <= lambda} { |sigma_ij|^2, |b_i| }.
    double bound_constant(double lambda, RegularityIndex p, const SchemePtr& scheme) const;

    void declare_lipschitz(double K) { declared_K_ = K; }
    void declare_bound(double K1) { declared_K1_ = K1; }

private:
    int d_ = 0;
    int n_ = 0;
    std::vector<std::vector<CoefficientEntry>> sigma_;
    std::vector<CoefficientEntry> b_;
    std::optional<double> declared_K_;
    std::optional<double> declared_K1_;
};

/// JSON spec {"sigma":[[entry]],"b":[entry]} with entry kinds
/// "constant" | "dual_pairing" | "point_eval" | "norm_functional".
/// Pairing elements may be written inline or as {"basis":[k...]}, resolved
/// against the ambient scheme.
CoefficientField field_from_json(const std::string& text, const SchemePtr& scheme);
std::string field_to_json(const CoefficientField& field);

/// Stable content hash of the field spec (records reference it).
std::string field_hash(const CoefficientField& field);

}  // namespace hermspde

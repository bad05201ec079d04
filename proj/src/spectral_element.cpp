#include "hermspde/spectral_element.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "hermspde/hermite.hpp"
#include "hermspde/quadrature.hpp"

namespace hermspde {

SpectralElement::SpectralElement(SchemePtr scheme)
    : scheme_(std::move(scheme)), re_(Eigen::VectorXd::Zero(scheme_->size())) {}

SpectralElement::SpectralElement(SchemePtr scheme, Eigen::VectorXd coeffs)
    : scheme_(std::move(scheme)), re_(std::move(coeffs)) {
    if (re_.size() != scheme_->size())
        throw std::invalid_argument("SpectralElement: coefficient length != |Gamma_N|");
    check_finite();
}

SpectralElement::SpectralElement(SchemePtr scheme, Eigen::VectorXd re, Eigen::VectorXd im)
    : scheme_(std::move(scheme)), re_(std::move(re)), im_(std::move(im)) {
    if (re_.size() != scheme_->size() || im_.size() != scheme_->size())
        throw std::invalid_argument("SpectralElement: coefficient length != |Gamma_N|");
    check_finite();
}

const Eigen::VectorXd& SpectralElement::imag_coeffs() const {
    static const Eigen::VectorXd empty;
    return is_complex() ? im_ : empty;
}

void SpectralElement::check_finite() const {
    if (!re_.allFinite() || (im_.size() > 0 && !im_.allFinite()))
        throw std::invalid_argument("SpectralElement: non-finite coefficient");
}

SpectralElement& SpectralElement::operator+=(const SpectralElement& other) {
    require_same_scheme(*this, other);
    re_ += other.re_;
    if (other.is_complex()) {
        if (!is_complex()) im_ = Eigen::VectorXd::Zero(re_.size());
        im_ += other.im_;
    }
    return *this;
}

SpectralElement& SpectralElement::operator-=(const SpectralElement& other) {
    require_same_scheme(*this, other);
    re_ -= other.re_;
    if (other.is_complex()) {
        if (!is_complex()) im_ = Eigen::VectorXd::Zero(re_.size());
        im_ -= other.im_;
    }
    return *this;
}

SpectralElement& SpectralElement::operator*=(double c) {
    re_ *= c;
    if (is_complex()) im_ *= c;
    return *this;
}

void require_same_scheme(const SpectralElement& a, const SpectralElement& b) {
    if (!a.scheme() || !b.scheme() || !a.scheme()->same_shape(*b.scheme()))
        throw std::invalid_argument("scheme mismatch between spectral elements");
}

SpectralElement basis_element(const SchemePtr& scheme, const MultiIndex& k) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(scheme->size());
    c[scheme->position(k)] = 1.0;
    return SpectralElement(scheme, std::move(c));
}

double sobolev_norm(const SpectralElement& u, RegularityIndex p) {
    const auto& scheme = *u.scheme();
    const int d = scheme.dimension();
    double s = 0.0;
    for (int i = 0; i < scheme.size(); ++i) {
        const double w = std::pow(2.0 * scheme.degree_at(i) + d, 2.0 * p.p);
        double m2 = u.coeffs()[i] * u.coeffs()[i];
        if (u.is_complex()) m2 += u.imag_coeffs()[i] * u.imag_coeffs()[i];
        s += w * m2;
    }
    return std::sqrt(s);
}

double dual_pairing(const SpectralElement& u, const SpectralElement& v) {
    require_same_scheme(u, v);
    if (u.is_complex() || v.is_complex())
        throw std::invalid_argument("dual_pairing: real elements expected");
    return u.coeffs().dot(v.coeffs());
}

double weighted_inner(const SpectralElement& u, const SpectralElement& v, RegularityIndex q) {
    require_same_scheme(u, v);
    const auto& scheme = *u.scheme();
    const int d = scheme.dimension();
    double s = 0.0;
    for (int i = 0; i < scheme.size(); ++i)
        s += std::pow(2.0 * scheme.degree_at(i) + d, 2.0 * q.p) * u.coeffs()[i] * v.coeffs()[i];
    return s;
}

SpectralElement delta_element(const std::vector<double>& x, const SchemePtr& scheme) {
    if (static_cast<int>(x.size()) != scheme->dimension())
        throw std::invalid_argument("delta_element: point has wrong dimension");
    const int N = scheme->degree_bound();
    std::vector<std::vector<double>> table(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) table[i] = hermite_values(x[i], N);
    Eigen::VectorXd c(scheme->size());
    for (int i = 0; i < scheme->size(); ++i) {
        const MultiIndex& k = scheme->index(i);
        double prod = 1.0;
        for (std::size_t a = 0; a < x.size(); ++a) prod *= table[a][k[a]];
        c[i] = prod;
    }
    return SpectralElement(scheme, std::move(c));
}

double evaluate(const SpectralElement& u, const std::vector<double>& x) {
    if (u.is_complex())
        throw std::invalid_argument("evaluate: use evaluate_complex for complex elements");
    return dual_pairing(delta_element(x, u.scheme()), u);
}

std::complex<double> evaluate_complex(const SpectralElement& u, const std::vector<double>& x) {
    const SpectralElement d = delta_element(x, u.scheme());
    double re = d.coeffs().dot(u.coeffs());
    double im = u.is_complex() ? d.coeffs().dot(u.imag_coeffs()) : 0.0;
    return {re, im};
}

SpectralElement fourier_transform(const SpectralElement& u) {
    const auto& scheme = *u.scheme();
    Eigen::VectorXd re(scheme.size()), im(scheme.size());
    for (int i = 0; i < scheme.size(); ++i) {
        const double a = u.coeffs()[i];
        const double b = u.is_complex() ? u.imag_coeffs()[i] : 0.0;
        switch (scheme.degree_at(i) % 4) {  // multiply by (-i)^{|k|}
            case 0: re[i] = a;  im[i] = b;  break;
            case 1: re[i] = b;  im[i] = -a; break;
            case 2: re[i] = -a; im[i] = -b; break;
            default: re[i] = -b; im[i] = a; break;
        }
    }
    return SpectralElement(u.scheme(), std::move(re), std::move(im));
}

SpectralElement project_function(const std::function<double(const std::vector<double>&)>& f,
                                 const SchemePtr& scheme, int Q) {
    const int d = scheme->dimension();
    const int N = scheme->degree_bound();
    if (Q < N + 2) throw std::invalid_argument("project_function: quadrature order must be >= N+2");
    const QuadratureRule& rule = cached_gauss_hermite(Q);

    // c_k = sum over tensor nodes of [prod_i w e^{x^2/2}] f(x) [prod_i p_{k_i}(x_i)]
    // where p_m(x) = h_m(x) e^{x^2/2} comes from the seeded recurrence.
    std::vector<std::vector<double>> scaled(Q);
    std::vector<double> scaled_w(Q);
    const double seed = std::pow(M_PI, -0.25);
    for (int j = 0; j < Q; ++j) {
        scaled[j] = hermite_seeded(rule.nodes[j], N, seed);
        scaled_w[j] = rule.weights[j] * std::exp(0.5 * rule.nodes[j] * rule.nodes[j]);
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(scheme->size());
    std::vector<int> digit(d, 0);
    std::vector<double> node(d);
    while (true) {
        double wprod = 1.0;
        for (int i = 0; i < d; ++i) {
            node[i] = rule.nodes[digit[i]];
            wprod *= scaled_w[digit[i]];
        }
        const double fval = f(node);
        if (!std::isfinite(fval)) {
            std::string where;
            for (int i = 0; i < d; ++i) where += (i ? "," : "") + std::to_string(node[i]);
            throw std::runtime_error("project_function: non-finite sample at node (" + where + ")");
        }
        const double base = wprod * fval;
        for (int i = 0; i < scheme->size(); ++i) {
            const MultiIndex& k = scheme->index(i);
            double prod = base;
            for (int a = 0; a < d; ++a) prod *= scaled[digit[a]][k[a]];
            c[i] += prod;
        }
        int axis = 0;
        while (axis < d && ++digit[axis] == Q) digit[axis++] = 0;
        if (axis == d) break;
    }
    return SpectralElement(scheme, std::move(c));
}

SpectralElement project_function(const std::function<double(const std::vector<double>&)>& f,
                                 const SchemePtr& scheme) {
    return project_function(f, scheme, scheme->degree_bound() + 8);
}

double tail_mass(const SpectralElement& u) {
    const auto& scheme = *u.scheme();
    double s = 0.0;
    for (int i = 0; i < scheme.size(); ++i)
        if (scheme.degree_at(i) == scheme.degree_bound())
            s += u.coeffs()[i] * u.coeffs()[i] +
                 (u.is_complex() ? u.imag_coeffs()[i] * u.imag_coeffs()[i] : 0.0);
    return s;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string element_to_json(const SpectralElement& u) {
    const auto& scheme = *u.scheme();
    std::string out = "{\"d\":" + std::to_string(scheme.dimension()) +
                      ",\"N\":" + std::to_string(scheme.degree_bound()) +
                      ",\"ordering\":\"grlex\",\"coeffs\":[";
    for (int i = 0; i < u.size(); ++i) {
        if (i) out += ',';
        out += fmt17(u.coeffs()[i]);
    }
    out += ']';
    if (u.is_complex()) {
        out += ",\"coeffs_im\":[";
        for (int i = 0; i < u.size(); ++i) {
            if (i) out += ',';
            out += fmt17(u.imag_coeffs()[i]);
        }
        out += ']';
    }
    out += '}';
    return out;
}

SpectralElement element_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("ordering", "grlex") != std::string("grlex"))
        throw std::invalid_argument("element_from_json: unknown ordering");
    auto scheme = make_scheme(j.at("d").get<int>(), j.at("N").get<int>());
    const auto& arr = j.at("coeffs");
    if (static_cast<int>(arr.size()) != scheme->size())
        throw std::invalid_argument("element_from_json: coefficient count mismatch");
    Eigen::VectorXd re(scheme->size());
    for (int i = 0; i < scheme->size(); ++i) re[i] = arr[i].get<double>();
    if (j.contains("coeffs_im")) {
        const auto& arr_im = j.at("coeffs_im");
        Eigen::VectorXd im(scheme->size());
        for (int i = 0; i < scheme->size(); ++i) im[i] = arr_im[i].get<double>();
        return SpectralElement(scheme, std::move(re), std::move(im));
    }
    return SpectralElement(scheme, std::move(re));
}

}  // namespace hermspde

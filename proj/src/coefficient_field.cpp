#include "hermspde/coefficient_field.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "hermspde/translation.hpp"

namespace hermspde {

using nlohmann::json;

double ScalarMap::operator()(double s) const {
    const double t = inner * s;
    switch (fn) {
        case Fn::identity: return offset + scale * t;
        case Fn::tanh: return offset + scale * std::tanh(t);
        case Fn::sin: return offset + scale * std::sin(t);
        case Fn::cos: return offset + scale * std::cos(t);
    }
    throw std::logic_error("ScalarMap: unknown function");
}

ScalarMap ScalarMap::affine(double offset, double scale) {
    ScalarMap g;
    g.offset = offset;
    g.scale = scale;
    return g;
}

ScalarMap ScalarMap::wrapped(Fn fn, double offset, double scale, double inner) {
    ScalarMap g;
    g.fn = fn;
    g.offset = offset;
    g.scale = scale;
    g.inner = inner;
    return g;
}

CoefficientEntry CoefficientEntry::constant(double c) {
    CoefficientEntry e;
    e.kind_ = Kind::constant;
    e.value_ = c;
    return e;
}

CoefficientEntry CoefficientEntry::dual_pairing(SpectralElement w, ScalarMap g) {
    CoefficientEntry e;
    e.kind_ = Kind::dual_pairing;
    e.w_ = std::move(w);
    e.g_ = g;
    return e;
}

CoefficientEntry CoefficientEntry::point_eval(std::vector<double> x0, ScalarMap g) {
    CoefficientEntry e;
    e.kind_ = Kind::point_eval;
    e.x0_ = std::move(x0);
    e.g_ = g;
    return e;
}

CoefficientEntry CoefficientEntry::norm_functional(double q, ScalarMap g) {
    CoefficientEntry e;
    e.kind_ = Kind::norm_functional;
    e.norm_q_ = q;
    e.g_ = g;
    return e;
}

double CoefficientEntry::operator()(const SpectralElement& phi) const {
    switch (kind_) {
        case Kind::constant: return value_;
        case Kind::dual_pairing: return g_(hermspde::dual_pairing(*w_, phi));
        case Kind::point_eval: return g_(evaluate(phi, x0_));
        case Kind::norm_functional:
            return g_(sobolev_norm(phi, RegularityIndex(norm_q_)));
    }
    throw std::logic_error("CoefficientEntry: unknown kind");
}

double CoefficientEntry::at_translate(const SpectralElement& y, const Eigen::VectorXd& z) const {
    switch (kind_) {
        case Kind::constant:
            return value_;
        case Kind::dual_pairing: {
            std::vector<double> zz(z.data(), z.data() + z.size());
            return g_(translate_pairing(*w_, y, zz));
        }
        case Kind::point_eval: {
            std::vector<double> shifted(x0_);
            for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] -= z[i];
            return g_(evaluate(y, shifted));  // (tau_z y)(x0) = y(x0 - z)
        }
        case Kind::norm_functional: {
            std::vector<double> zz(z.data(), z.data() + z.size());
            return g_(sobolev_norm(translate(y, zz), RegularityIndex(norm_q_)));
        }
    }
    throw std::logic_error("CoefficientEntry: unknown kind");
}

namespace {

// sup_k (2|k|+d)^e over Gamma_N; the worst weight ratio between two scales.
double max_weight_power(const SchemePtr& scheme, double e) {
    const double d = scheme->dimension();
    const double top = 2.0 * scheme->degree_bound() + d;
    return e >= 0 ? std::pow(top, e) : std::pow(d, e);
}

}  // namespace

double CoefficientEntry::lipschitz(RegularityIndex q, const SchemePtr& scheme) const {
    switch (kind_) {
        case Kind::constant:
            return 0.0;
        case Kind::dual_pairing:
            return g_.lipschitz() * sobolev_norm(*w_, RegularityIndex(-q.p));
        case Kind::point_eval:
            return g_.lipschitz() * sobolev_norm(delta_element(x0_, scheme), RegularityIndex(-q.p));
        case Kind::norm_functional:
            return g_.lipschitz() * max_weight_power(scheme, norm_q_ - q.p);
    }
    throw std::logic_error("CoefficientEntry: unknown kind");
}

double CoefficientEntry::bound(double lambda, RegularityIndex p, const SchemePtr& scheme) const {
    if (kind_ == Kind::constant) return std::abs(value_);
    if (g_.is_bounded()) return std::abs(g_.offset) + std::abs(g_.scale);
    double arg_bound = 0.0;
    switch (kind_) {
        case Kind::dual_pairing:
            arg_bound = sobolev_norm(*w_, RegularityIndex(-p.p)) * lambda;
            break;
        case Kind::point_eval:
            arg_bound = sobolev_norm(delta_element(x0_, scheme), RegularityIndex(-p.p)) * lambda;
            break;
        case Kind::norm_functional:
            arg_bound = max_weight_power(scheme, norm_q_ - p.p) * lambda;
            break;
        default:
            break;
    }
    return std::abs(g_.offset) + std::abs(g_.scale * g_.inner) * arg_bound;
}

CoefficientField::CoefficientField(std::vector<std::vector<CoefficientEntry>> sigma,
                                   std::vector<CoefficientEntry> b)
    : d_(static_cast<int>(b.size())),
      n_(sigma.empty() ? 0 : static_cast<int>(sigma.front().size())),
      sigma_(std::move(sigma)),
      b_(std::move(b)) {
    if (static_cast<int>(sigma_.size()) != d_)
        throw std::invalid_argument("CoefficientField: sigma must have d rows");
    for (const auto& row : sigma_)
        if (static_cast<int>(row.size()) != n_)
            throw std::invalid_argument("CoefficientField: ragged sigma rows");
    if (d_ < 1 || n_ < 1) throw std::invalid_argument("CoefficientField: need d >= 1, n >= 1");
}

namespace {

void check_value(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("CoefficientField: non-finite ") + what);
}

}  // namespace

Coefficients CoefficientField::eval(const SpectralElement& phi) const {
    Coefficients out;
    out.sigma.resize(d_, n_);
    out.b.resize(d_);
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < n_; ++j) {
            out.sigma(i, j) = sigma_[i][j](phi);
            check_value(out.sigma(i, j), "sigma value");
        }
        out.b[i] = b_[i](phi);
        check_value(out.b[i], "drift value");
    }
    out.a = out.sigma * out.sigma.transpose();
    return out;
}

Coefficients CoefficientField::eval_translate(const SpectralElement& y,
                                              const Eigen::VectorXd& z) const {
    Coefficients out;
    out.sigma.resize(d_, n_);
    out.b.resize(d_);
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < n_; ++j) {
            out.sigma(i, j) = sigma_[i][j].at_translate(y, z);
            check_value(out.sigma(i, j), "sigma value");
        }
        out.b[i] = b_[i].at_translate(y, z);
        check_value(out.b[i], "drift value");
    }
    out.a = out.sigma * out.sigma.transpose();
    return out;
}

bool CoefficientField::is_constant() const {
    for (const auto& row : sigma_)
        for (const auto& e : row)
            if (!e.is_constant()) return false;
    for (const auto& e : b_)
        if (!e.is_constant()) return false;
    return true;
}

double CoefficientField::lipschitz_constant(RegularityIndex q, const SchemePtr& scheme) const {
    if (declared_K_) return *declared_K_;
    double K = 0.0;
    for (const auto& row : sigma_)
        for (const auto& e : row) K = std::max(K, e.lipschitz(q, scheme));
    for (const auto& e : b_) K = std::max(K, e.lipschitz(q, scheme));
    return K;
}

double CoefficientField::bound_constant(double lambda, RegularityIndex p,
                                        const SchemePtr& scheme) const {
    if (declared_K1_) return *declared_K1_;
    double K1 = 0.0;
    for (const auto& row : sigma_)
        for (const auto& e : row) {
            const double s = e.bound(lambda, p, scheme);
            K1 = std::max(K1, s * s);
        }
    for (const auto& e : b_) K1 = std::max(K1, e.bound(lambda, p, scheme));
    return K1;
}

namespace {

json scalar_map_to_json(const ScalarMap& g) {
    const char* name = "identity";
    switch (g.fn) {
        case ScalarMap::Fn::identity: name = "identity"; break;
        case ScalarMap::Fn::tanh: name = "tanh"; break;
        case ScalarMap::Fn::sin: name = "sin"; break;
        case ScalarMap::Fn::cos: name = "cos"; break;
    }
    return json{{"type", name}, {"offset", g.offset}, {"scale", g.scale}, {"inner", g.inner}};
}

ScalarMap scalar_map_from_json(const json& j) {
    ScalarMap g;
    const std::string type = j.value("type", "identity");
    if (type == "identity")
        g.fn = ScalarMap::Fn::identity;
    else if (type == "tanh")
        g.fn = ScalarMap::Fn::tanh;
    else if (type == "sin")
        g.fn = ScalarMap::Fn::sin;
    else if (type == "cos")
        g.fn = ScalarMap::Fn::cos;
    else
        throw std::invalid_argument("scalar map: unknown type '" + type + "'");
    g.offset = j.value("offset", 0.0);
    g.scale = j.value("scale", 1.0);
    g.inner = j.value("inner", 1.0);
    return g;
}

SpectralElement element_from_spec(const json& j, const SchemePtr& scheme) {
    if (j.contains("basis")) {
        MultiIndex k = j.at("basis").get<MultiIndex>();
        return basis_element(scheme, k);
    }
    SpectralElement w = element_from_json(j.dump());
    if (!w.scheme()->same_shape(*scheme))
        throw std::invalid_argument("field element does not match the ambient scheme");
    return SpectralElement(scheme, w.coeffs());
}

CoefficientEntry entry_from_json(const json& j, const SchemePtr& scheme) {
    const std::string kind = j.at("kind").get<std::string>();
    const ScalarMap g = j.contains("g") ? scalar_map_from_json(j.at("g")) : ScalarMap{};
    if (kind == "constant") return CoefficientEntry::constant(j.at("value").get<double>());
    if (kind == "dual_pairing")
        return CoefficientEntry::dual_pairing(element_from_spec(j.at("w"), scheme), g);
    if (kind == "point_eval")
        return CoefficientEntry::point_eval(j.at("x0").get<std::vector<double>>(), g);
    if (kind == "norm_functional")
        return CoefficientEntry::norm_functional(j.at("q").get<double>(), g);
    throw std::invalid_argument("coefficient entry: unknown kind '" + kind + "'");
}

json entry_to_json(const CoefficientEntry& e) {
    json o;
    switch (e.kind()) {
        case CoefficientEntry::Kind::constant:
            o["kind"] = "constant";
            o["value"] = e.constant_value();
            break;
        case CoefficientEntry::Kind::dual_pairing:
            o["kind"] = "dual_pairing";
            o["w"] = json::parse(element_to_json(e.pairing_element()));
            break;
        case CoefficientEntry::Kind::point_eval:
            o["kind"] = "point_eval";
            o["x0"] = e.eval_point();
            break;
        case CoefficientEntry::Kind::norm_functional:
            o["kind"] = "norm_functional";
            o["q"] = e.norm_index();
            break;
    }
    if (e.kind() != CoefficientEntry::Kind::constant) o["g"] = scalar_map_to_json(e.post_map());
    return o;
}

}  // namespace

CoefficientField field_from_json(const std::string& text, const SchemePtr& scheme) {
    const json j = json::parse(text);
    std::vector<std::vector<CoefficientEntry>> sigma;
    for (const auto& row : j.at("sigma")) {
        std::vector<CoefficientEntry> entries;
        for (const auto& e : row) entries.push_back(entry_from_json(e, scheme));
        sigma.push_back(std::move(entries));
    }
    std::vector<CoefficientEntry> b;
    for (const auto& e : j.at("b")) b.push_back(entry_from_json(e, scheme));
    return CoefficientField(std::move(sigma), std::move(b));
}

std::string field_to_json(const CoefficientField& field) {
    json j;
    j["sigma"] = json::array();
    j["b"] = json::array();
    for (int i = 0; i < field.state_dim(); ++i) {
        json row = json::array();
        for (int jj = 0; jj < field.noise_dim(); ++jj)
            row.push_back(entry_to_json(field.sigma_entry(i, jj)));
        j["sigma"].push_back(row);
    }
    for (int i = 0; i < field.state_dim(); ++i) j["b"].push_back(entry_to_json(field.b_entry(i)));
    return j.dump();
}

std::string field_hash(const CoefficientField& field) {
    const std::string s = field_to_json(field);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hermspde

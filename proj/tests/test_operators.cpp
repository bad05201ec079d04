#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hermspde/operators.hpp"
#include "hermspde/translation.hpp"

using namespace hermspde;

namespace {

const double kPi = M_PI;

SpectralElement random_ball_element(const SchemePtr& scheme, std::mt19937& rng, double p,
                                    double lambda) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.2, 1.0);
    Eigen::VectorXd c(scheme->size());
    for (int i = 0; i < scheme->size(); ++i)
        c[i] = g(rng) * std::pow(2.0 * scheme->degree_at(i) + scheme->dimension(), -(p + 1.0));
    SpectralElement phi(scheme, std::move(c));
    const double norm = sobolev_norm(phi, RegularityIndex(p));
    return (lambda * u(rng) / norm) * phi;
}

CoefficientField constant_field_1d(double sigma, double b) {
    return CoefficientField({{CoefficientEntry::constant(sigma)}},
                            {CoefficientEntry::constant(b)});
}

// The acceptance-style nonlinear field: sigma = 0.3 + 0.1 tanh<phi,e0>,
// b = 0.1 sin<phi,e0>.
CoefficientField tanh_field(const SchemePtr& scheme) {
    const SpectralElement e0 = basis_element(scheme, MultiIndex(scheme->dimension(), 0));
    auto sig = CoefficientEntry::dual_pairing(
        e0, ScalarMap::wrapped(ScalarMap::Fn::tanh, 0.3, 0.1));
    auto drift =
        CoefficientEntry::dual_pairing(e0, ScalarMap::wrapped(ScalarMap::Fn::sin, 0.0, 0.1));
    return CoefficientField({{sig}}, {drift});
}

// Seven-term assembly of the monotonicity form from the bilinear pieces.
double assembled_form(const CoefficientField& field, const SpectralElement& phi,
                      const SpectralElement& psi, RegularityIndex q) {
    auto ops = shared_bundle(phi.scheme());
    const Coefficients cp = field.eval(phi);
    const Coefficients cq = field.eval(psi);
    const SpectralElement diff = phi - psi;

    const SpectralElement l1_same = bilinear_L1(*ops, cp.b, diff);
    const SpectralElement l1_cross = bilinear_L1(*ops, cp.b - cq.b, psi);
    const SpectralElement l2_same = bilinear_L2(*ops, cp.a, diff);
    const SpectralElement l2_cross = bilinear_L2(*ops, cp.a - cq.a, psi);
    const auto a0_same = bilinear_A0(*ops, cp.sigma, diff);
    const auto a0_cross = bilinear_A0(*ops, cp.sigma - cq.sigma, psi);

    double value = 2.0 * weighted_inner(diff, l1_same, q);
    value += 2.0 * weighted_inner(diff, l1_cross, q);
    value += 2.0 * weighted_inner(diff, l2_same, q);
    value += 2.0 * weighted_inner(diff, l2_cross, q);
    value += hs_norm_sq(a0_same, q);
    value += hs_norm_sq(a0_cross, q);
    for (std::size_t i = 0; i < a0_same.size(); ++i)
        value += 2.0 * weighted_inner(a0_same[i], a0_cross[i], q);
    return value;
}

}  // namespace

TEST_CASE("eval_coefficients: constant, pairing and point-eval entries") {
    auto scheme = make_scheme(1, 12);
    const SpectralElement e0 = basis_element(scheme, {0});

    const CoefficientField cf = constant_field_1d(2.5, -1.0);
    const Coefficients c = eval_coefficients(cf, e0);
    CHECK(c.sigma(0, 0) == 2.5);
    CHECK(c.b[0] == -1.0);
    CHECK(c.a(0, 0) == doctest::Approx(6.25));

    const CoefficientField pairing_field(
        {{CoefficientEntry::dual_pairing(e0)}}, {CoefficientEntry::point_eval({0.0})});
    const Coefficients cp = eval_coefficients(pairing_field, e0);
    CHECK(cp.sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cp.b[0] == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-13));
}

TEST_CASE("apply_A matches the derivative column and kills zero fields") {
    auto scheme = make_scheme(1, 10);
    const SpectralElement e0 = basis_element(scheme, {0});

    const auto A = apply_A(constant_field_1d(1.0, 0.0), e0);
    REQUIRE(A.size() == 1);
    // A(phi) = -D phi, so A(e_0) = (1/sqrt 2) e_1
    CHECK(A[0].coeffs()[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    for (int k = 0; k <= 10; ++k)
        if (k != 1) CHECK(A[0].coeffs()[k] == 0.0);

    const auto Z = apply_A(constant_field_1d(0.0, 0.7), e0);
    CHECK(sobolev_norm(Z[0], RegularityIndex(0.0)) == 0.0);
}

TEST_CASE("apply_L: pure second derivative and pure drift cases") {
    auto scheme = make_scheme(1, 10);
    auto ops = shared_bundle(scheme);
    const SpectralElement e0 = basis_element(scheme, {0});

    const SpectralElement l = apply_L(constant_field_1d(1.0, 0.0), e0);
    const SpectralElement dd = ops->apply_derivative(0, ops->apply_derivative(0, e0));
    for (int k = 0; k <= 10; ++k)
        CHECK(l.coeffs()[k] == doctest::Approx(0.5 * dd.coeffs()[k]).epsilon(1e-15));

    const SpectralElement ld = apply_L(constant_field_1d(0.0, 1.0), e0);
    const SpectralElement md = ops->apply_derivative(0, e0);
    for (int k = 0; k <= 10; ++k)
        CHECK(ld.coeffs()[k] == doctest::Approx(-md.coeffs()[k]).epsilon(1e-15));
}

TEST_CASE("apply_L bound ||L(phi)||_q <= C ||phi||_p from K_1 and the derivative norms") {
    const double p = 1.0, q = 0.0, lambda = 2.0;
    auto scheme = make_scheme(1, 20);
    const CoefficientField field = tanh_field(scheme);
    const double K1 = field.bound_constant(lambda, RegularityIndex(p), scheme);

    // operator norms of D and D^2 from S_p to S_q
    auto ops = shared_bundle(scheme);
    Eigen::MatrixXd D(ops->derivative(0));
    Eigen::VectorXd wp(scheme->size()), wq(scheme->size());
    for (int i = 0; i < scheme->size(); ++i) {
        wp[i] = std::pow(2.0 * scheme->degree_at(i) + 1, p);
        wq[i] = std::pow(2.0 * scheme->degree_at(i) + 1, q);
    }
    const Eigen::MatrixXd D1 = wq.asDiagonal() * D * wp.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd D2 =
        wq.asDiagonal() * (D * D) * wp.cwiseInverse().asDiagonal();
    const double M1 = Eigen::JacobiSVD<Eigen::MatrixXd>(D1).singularValues()[0];
    const double M2 = Eigen::JacobiSVD<Eigen::MatrixXd>(D2).singularValues()[0];
    const double C = 0.5 * K1 * M2 + K1 * M1;  // d = n = 1

    std::mt19937 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralElement phi = random_ball_element(scheme, rng, p, lambda);
        const double lhs = sobolev_norm(apply_L(field, phi), RegularityIndex(q));
        CHECK(lhs <= C * sobolev_norm(phi, RegularityIndex(p)) + 1e-12);
    }
}

TEST_CASE("apply_frozen: diagonal consistency, linearity, constant-freeze independence") {
    auto scheme = make_scheme(1, 14);
    const CoefficientField field = tanh_field(scheme);
    std::mt19937 rng(5);
    const SpectralElement phi = random_ball_element(scheme, rng, 1.0, 2.0);
    const SpectralElement psi = random_ball_element(scheme, rng, 1.0, 2.0);

    // diagonal equals apply_L / apply_A bitwise
    const FrozenResult diag = apply_frozen(field, phi, phi);
    const SpectralElement L = apply_L(field, phi);
    const auto A = apply_A(field, phi);
    for (int i = 0; i < phi.size(); ++i) {
        CHECK(diag.L.coeffs()[i] == L.coeffs()[i]);
        CHECK(diag.A[0].coeffs()[i] == A[0].coeffs()[i]);
    }

    // linearity (and homogeneity) in the second slot
    const FrozenResult one = apply_frozen(field, phi, psi);
    const FrozenResult two = apply_frozen(field, phi, 2.0 * psi);
    for (int i = 0; i < phi.size(); ++i) {
        CHECK(two.L.coeffs()[i] == doctest::Approx(2.0 * one.L.coeffs()[i]).epsilon(1e-13));
        CHECK(two.A[0].coeffs()[i] == doctest::Approx(2.0 * one.A[0].coeffs()[i]).epsilon(1e-13));
    }
    const FrozenResult sum = apply_frozen(field, phi, psi + phi);
    const FrozenResult parts_a = apply_frozen(field, phi, psi);
    const FrozenResult parts_b = apply_frozen(field, phi, phi);
    for (int i = 0; i < phi.size(); ++i)
        CHECK(sum.L.coeffs()[i] ==
              doctest::Approx(parts_a.L.coeffs()[i] + parts_b.L.coeffs()[i]).epsilon(1e-12));

    // constant fields do not see the frozen argument
    const CoefficientField cf = constant_field_1d(0.8, -0.2);
    const FrozenResult f1 = apply_frozen(cf, phi, psi);
    const FrozenResult f2 = apply_frozen(cf, psi, psi);
    for (int i = 0; i < phi.size(); ++i) CHECK(f1.L.coeffs()[i] == f2.L.coeffs()[i]);
}

TEST_CASE("HS norm identity") {
    auto scheme = make_scheme(2, 8);
    std::mt19937 rng(17);
    const SpectralElement phi = random_ball_element(scheme, rng, 1.0, 2.0);
    CoefficientField field({{CoefficientEntry::constant(1.0), CoefficientEntry::constant(0.5)},
                            {CoefficientEntry::constant(-0.25), CoefficientEntry::constant(2.0)}},
                           {CoefficientEntry::constant(0.1), CoefficientEntry::constant(0.2)});
    const auto A = apply_A(field, phi);
    double direct = 0.0;
    for (const auto& Ai : A) {
        const double ni = sobolev_norm(Ai, RegularityIndex(0.5));
        direct += ni * ni;
    }
    CHECK(hs_norm_sq(A, RegularityIndex(0.5)) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("monotonicity form: vanishing diagonal and the seven-term decomposition") {
    auto scheme = make_scheme(1, 24);
    const CoefficientField field = tanh_field(scheme);
    std::mt19937 rng(23);
    const RegularityIndex q(0.0);

    const SpectralElement phi = random_ball_element(scheme, rng, 1.0, 2.0);
    const MonotonicityValue self = monotonicity_form(field, phi, phi, q);
    CHECK(self.form == 0.0);
    CHECK(self.ratio == 0.0);

    for (int trial = 0; trial < 40; ++trial) {
        const SpectralElement a = random_ball_element(scheme, rng, 1.0, 2.0);
        const SpectralElement b = random_ball_element(scheme, rng, 1.0, 2.0);
        const MonotonicityValue v = monotonicity_form(field, a, b, q);
        const double expanded = assembled_form(field, a, b, q);
        CHECK(v.form == doctest::Approx(expanded).epsilon(1e-10));
    }
}

TEST_CASE("monotonicity ratio is stable under truncation refinement") {
    std::mt19937 rng(29);
    auto sup_ratio = [&rng](int N) {
        auto scheme = make_scheme(1, N);
        const CoefficientField field = tanh_field(scheme);
        std::mt19937 local(31);
        double sup = 0.0;
        for (int t = 0; t < 60; ++t) {
            const SpectralElement a = random_ball_element(scheme, local, 1.0, 2.0);
            const SpectralElement b = random_ball_element(scheme, local, 1.0, 2.0);
            sup = std::max(sup, monotonicity_form(field, a, b, RegularityIndex(0.0)).ratio);
        }
        return sup;
    };
    const double c16 = sup_ratio(16);
    const double c32 = sup_ratio(32);
    CHECK(std::isfinite(c16));
    CHECK(c32 <= 1.5 * c16);
}

TEST_CASE("monotonicity variant: collapse cases and comparator") {
    auto scheme = make_scheme(1, 16);
    const CoefficientField field = tanh_field(scheme);
    std::mt19937 rng(41);
    const RegularityIndex q(0.0);

    const SpectralElement a = random_ball_element(scheme, rng, 1.0, 2.0);
    const MonotonicityVariantValue zero = monotonicity_form_variant(field, a, a, a, q, 1.0);
    CHECK(zero.form == 0.0);
    CHECK(zero.comparator == 0.0);

    // phi3 = phi2 collapses termwise onto the two-argument form when the
    // coefficients carry no state dependence (for state-dependent fields the
    // frozen slots differ: L(phi2, phi1) freezes at phi2, not phi1)
    const SpectralElement b = random_ball_element(scheme, rng, 1.0, 2.0);
    const CoefficientField cf = constant_field_1d(0.7, -0.3);
    const MonotonicityVariantValue collapsed = monotonicity_form_variant(cf, b, a, a, q, 1.0);
    const MonotonicityValue direct = monotonicity_form(cf, a, b, q);
    CHECK(collapsed.form == doctest::Approx(direct.form).epsilon(1e-12));

    // empirical C1 over random triples, stable in N
    auto sup_c1 = [](int N) {
        auto scheme_n = make_scheme(1, N);
        const CoefficientField f = tanh_field(scheme_n);
        std::mt19937 local(43);
        double sup = 0.0;
        for (int t = 0; t < 60; ++t) {
            const SpectralElement p1 = random_ball_element(scheme_n, local, 1.0, 2.0);
            const SpectralElement p2 = random_ball_element(scheme_n, local, 1.0, 2.0);
            const SpectralElement p3 = random_ball_element(scheme_n, local, 1.0, 2.0);
            const MonotonicityVariantValue v =
                monotonicity_form_variant(f, p1, p2, p3, RegularityIndex(0.0), 1.0);
            if (v.comparator > 0.0) sup = std::max(sup, v.form / v.comparator);
        }
        return sup;
    };
    const double c16 = sup_c1(16);
    const double c32 = sup_c1(32);
    CHECK(std::isfinite(c16));
    CHECK(c32 <= 1.5 * c16);
}

TEST_CASE("cross-term inequality: empirical constant stable between N=16 and N=64") {
    auto sup_const = [](int N) {
        auto scheme = make_scheme(1, N);
        auto ops = shared_bundle(scheme);
        std::mt19937 rng(47);
        std::normal_distribution<double> g;
        double sup = 0.0;
        for (int t = 0; t < 500; ++t) {
            Eigen::VectorXd ca = Eigen::VectorXd::Zero(scheme->size());
            Eigen::VectorXd cb = Eigen::VectorXd::Zero(scheme->size());
            for (int i = 0; i < scheme->size(); ++i) {
                if (scheme->degree_at(i) > N - 2) continue;  // interior support
                const double w = std::pow(2.0 * scheme->degree_at(i) + 1, -2.0);
                ca[i] = g(rng) * w;
                cb[i] = g(rng) * w;
            }
            const SpectralElement phi(scheme, ca), psi(scheme, cb);
            const SpectralElement dphi = ops->apply_derivative(0, phi);
            const SpectralElement dpsi = ops->apply_derivative(0, psi);
            const double num = std::abs(weighted_inner(dphi, dpsi, RegularityIndex(0.0)));
            const double den = sobolev_norm(phi, RegularityIndex(0.0)) *
                               sobolev_norm(psi, RegularityIndex(1.0));
            if (den > 0) sup = std::max(sup, num / den);
        }
        return sup;
    };
    const double c16 = sup_const(16);
    const double c64 = sup_const(64);
    CHECK(c64 <= 1.5 * c16);
}

TEST_CASE("adjoint defect: zero at q=0, bounded at q=1 while ||D|| grows") {
    auto s32 = make_scheme(1, 32);
    auto s64 = make_scheme(1, 64);
    auto b32 = shared_bundle(s32);
    auto b64 = shared_bundle(s64);

    CHECK(b32->adjoint_defect_norm(0, RegularityIndex(0.0)) <= 1e-12);
    CHECK(b64->adjoint_defect_norm(0, RegularityIndex(0.0)) <= 1e-12);

    const double t32 = b32->adjoint_defect_norm(0, RegularityIndex(1.0));
    const double t64 = b64->adjoint_defect_norm(0, RegularityIndex(1.0));
    CHECK(t64 <= 1.2 * t32);

    const double d32 = b32->derivative_norm(0, RegularityIndex(1.0));
    const double d64 = b64->derivative_norm(0, RegularityIndex(1.0));
    CHECK(d64 / d32 > 1.3);
    CHECK(d64 / d32 < 1.5);
    CHECK(t64 / d64 < t32 / d32);  // defect-to-norm ratio decays
}

TEST_CASE("entry Lipschitz constants bound sampled differences") {
    auto scheme = make_scheme(1, 16);
    const RegularityIndex q(0.0);
    std::mt19937 rng(53);

    const SpectralElement w = random_ball_element(scheme, rng, 1.0, 1.5);
    const auto entries = {
        CoefficientEntry::dual_pairing(w, ScalarMap::wrapped(ScalarMap::Fn::tanh, 0.2, 0.4)),
        CoefficientEntry::point_eval({0.3}, ScalarMap::affine(0.0, 0.5)),
        CoefficientEntry::norm_functional(0.0, ScalarMap::wrapped(ScalarMap::Fn::sin, 0.1, 0.3)),
    };
    for (const auto& entry : entries) {
        const double K = entry.lipschitz(q, scheme);
        CHECK(std::isfinite(K));
        for (int t = 0; t < 50; ++t) {
            const SpectralElement a = random_ball_element(scheme, rng, 1.0, 2.0);
            const SpectralElement b = random_ball_element(scheme, rng, 1.0, 2.0);
            const double diff = std::abs(entry(a) - entry(b));
            CHECK(diff <= K * sobolev_norm(a - b, q) + 1e-12);
        }
    }

    // sharp values for the plain kinds
    const CoefficientEntry plain = CoefficientEntry::dual_pairing(w);
    CHECK(plain.lipschitz(q, scheme) ==
          doctest::Approx(sobolev_norm(w, RegularityIndex(-0.0))).epsilon(1e-13));
    const CoefficientEntry pe = CoefficientEntry::point_eval({0.3});
    CHECK(pe.lipschitz(q, scheme) ==
          doctest::Approx(sobolev_norm(delta_element({0.3}, scheme), RegularityIndex(-0.0)))
              .epsilon(1e-13));
    const CoefficientEntry nf = CoefficientEntry::norm_functional(0.0);
    CHECK(nf.lipschitz(q, scheme) == doctest::Approx(1.0));
}

TEST_CASE("coefficient field JSON round-trip and hashing") {
    auto scheme = make_scheme(1, 8);
    const std::string spec = R"({
      "sigma": [[{"kind":"dual_pairing","w":{"basis":[0]},
                  "g":{"type":"tanh","offset":0.3,"scale":0.1}}]],
      "b":     [{"kind":"constant","value":-0.5}]
    })";
    const CoefficientField field = field_from_json(spec, scheme);
    CHECK(field.state_dim() == 1);
    CHECK(field.noise_dim() == 1);
    CHECK(!field.is_constant());

    const SpectralElement e0 = basis_element(scheme, {0});
    const Coefficients c = field.eval(e0);
    CHECK(c.sigma(0, 0) == doctest::Approx(0.3 + 0.1 * std::tanh(1.0)).epsilon(1e-13));
    CHECK(c.b[0] == -0.5);

    const CoefficientField back = field_from_json(field_to_json(field), scheme);
    const Coefficients c2 = back.eval(e0);
    CHECK(c2.sigma(0, 0) == doctest::Approx(c.sigma(0, 0)).epsilon(1e-15));
    CHECK(field_hash(field) == field_hash(back));
    CHECK(field_hash(field) != field_hash(constant_field_1d(1.0, 0.0)));

    CHECK_THROWS_AS(field_from_json(R"({"sigma":[[{"kind":"mystery"}]],"b":[]})", scheme),
                    std::invalid_argument);
}

TEST_CASE("eval rejects non-finite functional values") {
    auto scheme = make_scheme(1, 6);
    // identity-wrapped point eval with an inf offset forces a non-finite value
    CoefficientField bad(
        {{CoefficientEntry::constant(1.0)}},
        {CoefficientEntry::point_eval({0.0},
                                      ScalarMap::affine(std::numeric_limits<double>::infinity(),
                                                        1.0))});
    CHECK_THROWS_AS(bad.eval(basis_element(scheme, {0})), std::runtime_error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hermspde/hermite.hpp"
#include "hermspde/quadrature.hpp"
#include "hermspde/spectral_element.hpp"
#include "hermspde/translation.hpp"

using namespace hermspde;

namespace {

const double kPi = M_PI;

SpectralElement smooth_test_element(const SchemePtr& scheme, unsigned seed, double decay = 0.6) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXd c(scheme->size());
    for (int i = 0; i < scheme->size(); ++i)
        c[i] = g(rng) * std::exp(-decay * scheme->degree_at(i));  // rapidly decaying tail
    return SpectralElement(scheme, std::move(c));
}

// Unitary Fourier transform of u at xi by direct oscillatory quadrature,
// convention (F u)(xi) = (2 pi)^{-1/2} int u(x) e^{-i x xi} dx.
std::complex<double> fourier_by_quadrature(const SpectralElement& u, double xi) {
    const QuadratureRule& rule = cached_gauss_hermite(96);
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < rule.order; ++i) {
        const double x = rule.nodes[i];
        const double uval = evaluate(u, {x});
        const double scaled = uval * std::exp(x * x);  // against the e^{-x^2} weight
        acc += rule.weights[i] * scaled * std::complex<double>(std::cos(x * xi), -std::sin(x * xi));
    }
    return acc / std::sqrt(2.0 * kPi);
}

}  // namespace

TEST_CASE("sobolev norms: unit coefficients and the L2 case") {
    auto scheme = make_scheme(1, 8);
    const SpectralElement e0 = basis_element(scheme, {0});
    const SpectralElement e1 = basis_element(scheme, {1});
    for (double p : {-2.0, -1.0, 0.0, 0.5, 1.0, 3.0})
        CHECK(sobolev_norm(e0, RegularityIndex(p)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sobolev_norm(e1, RegularityIndex(1.0)) == doctest::Approx(3.0).epsilon(1e-14));

    const SpectralElement u = smooth_test_element(scheme, 7);
    CHECK(sobolev_norm(u, RegularityIndex(0.0)) ==
          doctest::Approx(u.coeffs().norm()).epsilon(1e-14));
}

TEST_CASE("norm monotonicity in p") {
    auto scheme = make_scheme(2, 7);
    const SpectralElement u = smooth_test_element(scheme, 11);
    double prev = sobolev_norm(u, RegularityIndex(-2.0));
    for (double p : {-1.0, -0.5, 0.0, 1.0, 2.0}) {
        const double cur = sobolev_norm(u, RegularityIndex(p));
        CHECK(cur >= prev - 1e-15);
        prev = cur;
    }
}

TEST_CASE("dual pairing basics") {
    auto scheme = make_scheme(1, 10);
    const SpectralElement e0 = basis_element(scheme, {0});
    const SpectralElement e3 = basis_element(scheme, {3});
    const SpectralElement d0 = delta_element({0.0}, scheme);

    CHECK(dual_pairing(d0, e0) == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-13));
    CHECK(dual_pairing(e0, e3) == 0.0);
    CHECK(dual_pairing(e3, e3) == 1.0);
    CHECK_THROWS_AS(dual_pairing(e0, basis_element(make_scheme(1, 9), {0})),
                    std::invalid_argument);
}

TEST_CASE("delta element: defining property and odd-mode vanishing") {
    auto scheme = make_scheme(1, 32);
    const SpectralElement d0 = delta_element({0.0}, scheme);
    CHECK(d0.coeffs()[1] == doctest::Approx(0.0));

    const SpectralElement f = project_function(
        [](const std::vector<double>& x) { return std::exp(-x[0] * x[0]) * (1.0 + 0.3 * x[0]); },
        scheme);
    for (double x : {-1.0, 0.0, 0.7}) {
        const double direct = std::exp(-x * x) * (1.0 + 0.3 * x);
        CHECK(std::abs(dual_pairing(delta_element({x}, scheme), f) - direct) < 1e-6);
    }
}

TEST_CASE("delta norms: p=-1 partial sums settle while p=0 grows like N^(1/4)") {
    // oracle: the same partial sums sum_k (2k+1)^{2p} h_k(0)^2, computed directly
    auto norm_at = [](int N, double p) {
        const auto h = hermite_values(0.0, N);
        double s = 0.0;
        for (int k = 0; k <= N; ++k) s += std::pow(2.0 * k + 1.0, 2.0 * p) * h[k] * h[k];
        return std::sqrt(s);
    };
    for (int N : {16, 64, 256}) {
        auto scheme = make_scheme(1, N);
        const SpectralElement d0 = delta_element({0.0}, scheme);
        CHECK(sobolev_norm(d0, RegularityIndex(-1.0)) ==
              doctest::Approx(norm_at(N, -1.0)).epsilon(1e-13));
        CHECK(sobolev_norm(d0, RegularityIndex(0.0)) ==
              doctest::Approx(norm_at(N, 0.0)).epsilon(1e-13));
    }
    // convergence in S_{-1}
    CHECK(std::abs(norm_at(256, -1.0) - norm_at(64, -1.0)) < 2e-2 * norm_at(64, -1.0));
    // quarter-power growth in S_0: quadrupling N scales the norm by ~ 4^{1/4}
    const double ratio = norm_at(256, 0.0) / norm_at(64, 0.0);
    CHECK(ratio > 1.2);
    CHECK(ratio < 1.6);
}

TEST_CASE("evaluate: closed form, zero element, translation consistency") {
    auto scheme = make_scheme(1, 24);
    const SpectralElement e0 = basis_element(scheme, {0});
    CHECK(evaluate(e0, {0.0}) == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-13));
    CHECK(evaluate(SpectralElement(scheme), {3.2}) == 0.0);

    const SpectralElement u = smooth_test_element(scheme, 3);
    const SpectralElement moved = translate(u, {0.8});
    for (double y : {-1.0, 0.0, 1.5})
        CHECK(std::abs(evaluate(moved, {y}) - evaluate(u, {y - 0.8})) < 1e-6);
}

TEST_CASE("translate by zero is the identity for both methods") {
    auto scheme = make_scheme(1, 16);
    const SpectralElement u = smooth_test_element(scheme, 5);
    TranslationOptions quad, expo;
    expo.method = TranslationMethod::exponential;
    const SpectralElement a = translate(u, {0.0}, quad);
    const SpectralElement b = translate(u, {0.0}, expo);
    for (int i = 0; i < u.size(); ++i) {
        CHECK(a.coeffs()[i] == u.coeffs()[i]);
        CHECK(b.coeffs()[i] == u.coeffs()[i]);
    }
}

TEST_CASE("translate(e_0, 1) matches the generating-function coefficients") {
    auto scheme = make_scheme(1, 14);
    const SpectralElement e0 = basis_element(scheme, {0});
    for (auto method : {TranslationMethod::quadrature, TranslationMethod::exponential}) {
        TranslationOptions opts;
        opts.method = method;
        const SpectralElement moved = translate(e0, {1.0}, opts);
        double fact = 1.0;
        for (int k = 0; k <= 14; ++k) {
            if (k > 0) fact *= k;
            const double expected =
                std::exp(-0.25) * std::pow(std::sqrt(0.5), k) / std::sqrt(fact);
            CHECK(moved.coeffs()[k] == doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("translation guard and input validation") {
    auto scheme = make_scheme(1, 8);
    const SpectralElement u = basis_element(scheme, {0});
    CHECK_THROWS_AS(translate(u, {60.0}), std::invalid_argument);
    CHECK_THROWS_AS(translate(u, {std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(translate(u, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("translation group law and method agreement") {
    auto scheme = make_scheme(1, 24);
    const SpectralElement u = smooth_test_element(scheme, 13, 1.0);
    REQUIRE(tail_mass(u) < 1e-10);

    const SpectralElement one_hop = translate(translate(u, {1.3}), {-0.6});
    const SpectralElement direct = translate(u, {0.7});
    CHECK(sobolev_norm(one_hop - direct, RegularityIndex(0.0)) < 1e-6);

    TranslationOptions expo;
    expo.method = TranslationMethod::exponential;
    for (double x : {-2.0, -0.4, 1.1, 2.0}) {
        const SpectralElement a = translate(u, {x});
        const SpectralElement b = translate(u, {x}, expo);
        CHECK(sobolev_norm(a - b, RegularityIndex(0.0)) < 1e-6);
    }
}

TEST_CASE("translation adjoint under the duality pairing") {
    auto scheme = make_scheme(1, 24);
    const SpectralElement u = smooth_test_element(scheme, 17);
    const SpectralElement v = smooth_test_element(scheme, 19);
    for (double x : {-1.4, 0.5, 2.0}) {
        const double lhs = dual_pairing(translate(u, {x}), v);
        const double rhs = dual_pairing(u, translate(v, {-x}));
        CHECK(std::abs(lhs - rhs) < 1e-8);
    }
}

TEST_CASE("two-dimensional translate factorizes over axes") {
    auto scheme = make_scheme(2, 10);
    // product element h_1(x) h_2(y) translated along both axes
    const SpectralElement u = basis_element(scheme, {1, 2});
    const SpectralElement moved = translate(u, {0.5, -0.3});
    auto scheme1 = make_scheme(1, 10);
    const SpectralElement mx = translate(basis_element(scheme1, {1}), {0.5});
    const SpectralElement my = translate(basis_element(scheme1, {2}), {-0.3});
    for (int i = 0; i < scheme->size(); ++i) {
        const MultiIndex& k = scheme->index(i);
        const double expected = mx.coeffs()[k[0]] * my.coeffs()[k[1]];
        CHECK(moved.coeffs()[i] == doctest::Approx(expected).epsilon(5e-8));
    }
}

TEST_CASE("translate_pairing agrees with materialized translation") {
    auto scheme = make_scheme(1, 24);
    const SpectralElement u = smooth_test_element(scheme, 23);
    const SpectralElement w = smooth_test_element(scheme, 29);
    for (double z : {-2.2, 0.0, 0.9, 3.5}) {
        const double direct = translate_pairing(w, u, {z});
        const double materialized = dual_pairing(w, translate(u, {z}));
        CHECK(direct == doctest::Approx(materialized).epsilon(1e-8));
    }
}

TEST_CASE("polynomial norm growth of translates (slope fit)") {
    // ||tau_x e_0||_p grows polynomially; the log-log slope over x in [2, 20]
    // stays below 2|p| + 1. N large enough that the shifted Gaussian keeps
    // its coefficient mass inside the basis over the whole fit range.
    auto scheme = make_scheme(1, 320);
    const SpectralElement e0 = basis_element(scheme, {0});
    const std::vector<double> xs = {2.0, 3.17, 5.02, 7.96, 12.6, 20.0};
    for (double p : {1.0, 2.0}) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double x : xs) {
            const double nx = sobolev_norm(translate(e0, {x}), RegularityIndex(p));
            const double lx = std::log(x), ly = std::log(nx);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double n = static_cast<double>(xs.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope <= 2.0 * p + 1.0);
        CHECK(slope > 0.5);  // genuinely growing
    }
}

TEST_CASE("fourier transform: eigenvalue law against oscillatory quadrature") {
    auto scheme = make_scheme(1, 12);
    const SpectralElement e0 = basis_element(scheme, {0});
    const SpectralElement F0 = fourier_transform(e0);
    for (int k = 0; k <= 12; ++k) {
        CHECK(F0.coeffs()[k] == doctest::Approx(e0.coeffs()[k]));
        CHECK(F0.imag_coeffs()[k] == 0.0);
    }
    for (double xi : {-1.7, 0.0, 0.6, 2.3}) {
        const auto direct = fourier_by_quadrature(e0, xi);
        const auto viaco = evaluate_complex(F0, {xi});
        CHECK(viaco.real() == doctest::Approx(direct.real()).epsilon(1e-9));
        CHECK(std::abs(viaco.imag() - direct.imag()) < 1e-9);
    }
    // an odd mode picks up the phase -i
    const SpectralElement F1 = fourier_transform(basis_element(scheme, {1}));
    for (double xi : {0.4, 1.2}) {
        const auto direct = fourier_by_quadrature(basis_element(scheme, {1}), xi);
        const auto viaco = evaluate_complex(F1, {xi});
        CHECK(viaco.real() == doctest::Approx(direct.real()).epsilon(1e-9));
        CHECK(viaco.imag() == doctest::Approx(direct.imag()).epsilon(1e-9));
    }
}

TEST_CASE("fourier transform is unitary and of order four") {
    auto scheme = make_scheme(2, 9);
    const SpectralElement u = smooth_test_element(scheme, 31);
    const SpectralElement Fu = fourier_transform(u);
    for (double p : {-1.0, 0.0, 1.5})
        CHECK(sobolev_norm(Fu, RegularityIndex(p)) ==
              doctest::Approx(sobolev_norm(u, RegularityIndex(p))).epsilon(1e-13));

    const SpectralElement F4 = fourier_transform(fourier_transform(fourier_transform(Fu)));
    for (int i = 0; i < u.size(); ++i) {
        CHECK(F4.coeffs()[i] == doctest::Approx(u.coeffs()[i]).epsilon(1e-14));
        CHECK(F4.imag_coeffs()[i] == 0.0);
    }
}

TEST_CASE("JSON round-trip with 17-significant-digit formatting") {
    auto scheme = make_scheme(2, 4);
    const SpectralElement u = smooth_test_element(scheme, 37);
    const std::string text = element_to_json(u);
    CHECK(text.find("\"ordering\":\"grlex\"") != std::string::npos);
    const SpectralElement back = element_from_json(text);
    REQUIRE(back.scheme()->same_shape(*u.scheme()));
    for (int i = 0; i < u.size(); ++i)
        CHECK(back.coeffs()[i] == doctest::Approx(u.coeffs()[i]).epsilon(1e-16));
}

#include "hermspde/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "hermspde/operators.hpp"
#include "hermspde/parallel.hpp"
#include "hermspde/solver.hpp"

namespace hermspde {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void add_part(AcceptanceResult& r, const std::string& name, double measured, double tolerance,
              bool larger_fails = true) {
    CheckItem item;
    item.name = name;
    item.measured = measured;
    item.tolerance = tolerance;
    item.pass = larger_fails ? measured <= tolerance : measured >= tolerance;
    r.parts.push_back(item);
}

void finish(AcceptanceResult& r, const Timer& timer) {
    r.seconds = timer.seconds();
    if (r.runtime_limit > 0.0) add_part(r, "runtime [s]", r.seconds, r.runtime_limit);
    r.pass = true;
    for (const auto& p : r.parts) r.pass = r.pass && p.pass;
}

// The suite's reference nonlinear field:
// sigma(phi) = 0.3 + 0.1 tanh <phi, e0>_0, b(phi) = 0.1 sin <phi, e0>_0.
CoefficientField suite_field(const SchemePtr& scheme) {
    const SpectralElement e0 = basis_element(scheme, MultiIndex(scheme->dimension(), 0));
    return CoefficientField(
        {{CoefficientEntry::dual_pairing(e0, ScalarMap::wrapped(ScalarMap::Fn::tanh, 0.3, 0.1))}},
        {CoefficientEntry::dual_pairing(e0, ScalarMap::wrapped(ScalarMap::Fn::sin, 0.0, 0.1))});
}

CoefficientField constant_field(double sigma, double b) {
    return CoefficientField({{CoefficientEntry::constant(sigma)}},
                            {CoefficientEntry::constant(b)});
}

SpectralElement random_ball_element(const SchemePtr& scheme, std::mt19937& rng, double p,
                                    double lambda) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.2, 1.0);
    Eigen::VectorXd c(scheme->size());
    for (int i = 0; i < scheme->size(); ++i)
        c[i] = g(rng) * std::pow(2.0 * scheme->degree_at(i) + scheme->dimension(), -(p + 1.0));
    SpectralElement phi(scheme, std::move(c));
    return (lambda * u(rng) / sobolev_norm(phi, RegularityIndex(p))) * phi;
}

// Seven-term assembly of the monotonicity form from the bilinear pieces
// (the decomposition route, independent of monotonicity_form's direct path).
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

std::string AcceptanceResult::summary() const {
    std::string line = pass ? "[PASS] " : "[FAIL] ";
    char head[64];
    std::snprintf(head, sizeof(head), "%02d %s:", id, name.c_str());
    line += head;
    for (const auto& p : parts) {
        line += " " + p.name + "=" + fmt(p.measured) + (p.pass ? "" : "(!)") + " (tol " +
                fmt(p.tolerance) + ");";
    }
    return line;
}

// --- 1: route equivalence -------------------------------------------------

AcceptanceResult acceptance_route_equivalence() {
    AcceptanceResult r;
    r.id = 1;
    r.name = "route-equivalence";
    r.runtime_limit = 60.0;
    Timer timer;

    auto scheme = make_scheme(1, 24);
    const SpectralElement y = basis_element(scheme, {0});
    const CoefficientField field = suite_field(scheme);
    const NoiseDriver driver(7, 1, 1e-3);

    std::vector<double> times;
    for (int i = 1; i <= 10; ++i) times.push_back(0.05 * i);

    const SolutionRecord tr = solve_translation(field, y, RegularityIndex(1.0),
                                                RegularityIndex(0.0), 1e-3, 0.5, driver, 0, times);
    const PicardRecord pc =
        solve_picard(field, y, RegularityIndex(0.0), 2.0, 6, 1e-3, 0.5, driver, 0, times);

    double sup = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s)
        sup = std::max(sup, sobolev_norm(tr.snapshots[s] - pc.final_snapshots[s],
                                         RegularityIndex(0.0)));
    add_part(r, "sup_snapshot_error", sup, 1e-2);
    finish(r, timer);
    return r;
}

// --- 2: Picard factorial decay ---------------------------------------------

AcceptanceResult acceptance_picard_decay() {
    AcceptanceResult r;
    r.id = 2;
    r.name = "picard-factorial-decay";
    Timer timer;

    auto scheme = make_scheme(1, 24);
    const SpectralElement y = basis_element(scheme, {0});
    const CoefficientField field = suite_field(scheme);
    const NoiseDriver driver(7, 1, 1e-3);
    const int k_max = 6;
    const int paths = 64;

    const auto per_path = map_streams<std::vector<double>>(paths, [&](std::uint64_t s) {
        const PicardRecord rec =
            solve_picard(field, y, RegularityIndex(0.0), 2.0, k_max, 1e-3, 0.5, driver, s, {0.25});
        std::vector<double> e(k_max);
        for (int k = 1; k <= k_max; ++k) e[k - 1] = rec.error_curve[k - 1][0];
        return e;
    });

    std::vector<double> ms(k_max, 0.0);  // ensemble mean-square per iterate
    for (const auto& e : per_path)
        for (int k = 0; k < k_max; ++k) ms[k] += e[k] * e[k];
    for (double& v : ms) v /= paths;

    double worst_ratio = 0.0;  // successive mean-square ratios for k = 2..6
    for (int k = 2; k < k_max; ++k) worst_ratio = std::max(worst_ratio, ms[k] / ms[k - 1]);
    add_part(r, "max_successive_ratio", worst_ratio, 1.0 - 1e-12);
    add_part(r, "e6_over_e2", ms[5] / ms[1], 1e-2);

    double max_second_diff = -1e300;  // concavity of log e_k
    for (int k = 1; k + 1 < k_max; ++k) {
        const double d2 = std::log(ms[k + 1]) - 2.0 * std::log(ms[k]) + std::log(ms[k - 1]);
        max_second_diff = std::max(max_second_diff, d2);
    }
    add_part(r, "log_concavity_defect", max_second_diff, 1e-6);
    finish(r, timer);
    return r;
}

// --- 3: heat representation -------------------------------------------------

AcceptanceResult acceptance_heat_representation() {
    AcceptanceResult r;
    r.id = 3;
    r.name = "heat-representation";
    r.runtime_limit = 120.0;
    Timer timer;

    auto scheme = make_scheme(1, 24);
    HeatConfig cfg{constant_field(1.0, 0.0), basis_element(scheme, {0})};
    cfg.t = 0.5;
    cfg.dt = 1e-3;
    cfg.paths = 20000;
    cfg.seed = 3;
    const Report rep = run_heat_check(cfg);
    add_part(r, "max_coeff_excess_over_3se+1e-6", rep.checks.at(0).measured, 0.0);
    finish(r, timer);
    return r;
}

// --- 4: monotonicity stability ----------------------------------------------

AcceptanceResult acceptance_monotonicity_stability() {
    AcceptanceResult r;
    r.id = 4;
    r.name = "monotonicity-stability";
    Timer timer;

    const RegularityIndex q(0.0);
    const double p = 1.0, lambda = 2.0;
    const int samples = 200;

    bool all_finite = true;
    double decomposition_defect = 0.0;
    auto sup_constants = [&](int N) {
        auto scheme = make_scheme(1, N);
        const CoefficientField field = suite_field(scheme);
        std::mt19937 rng(20240601);
        double sup_pair = 0.0, sup_triple = 0.0;
        for (int t = 0; t < samples; ++t) {
            const SpectralElement a = random_ball_element(scheme, rng, p, lambda);
            const SpectralElement b = random_ball_element(scheme, rng, p, lambda);
            const MonotonicityValue v = monotonicity_form(field, a, b, q);
            all_finite = all_finite && std::isfinite(v.form);
            sup_pair = std::max(sup_pair, v.ratio);
            decomposition_defect = std::max(
                decomposition_defect,
                std::abs(v.form - assembled_form(field, a, b, q)) /
                    std::max(1.0, std::abs(v.form)));

            const SpectralElement c = random_ball_element(scheme, rng, p, lambda);
            const MonotonicityVariantValue w = monotonicity_form_variant(field, a, b, c, q, 1.0);
            all_finite = all_finite && std::isfinite(w.form);
            if (w.comparator > 0.0) sup_triple = std::max(sup_triple, w.form / w.comparator);
        }
        return std::pair<double, double>{sup_pair, sup_triple};
    };
    const auto c16 = sup_constants(16);
    const auto c64 = sup_constants(64);

    add_part(r, "all_form_values_finite", all_finite ? 1.0 : 0.0, 1.0, false);
    add_part(r, "pair_C64_over_C16", c64.first / c16.first, 1.5);
    add_part(r, "triple_C64_over_C16", c64.second / c16.second, 1.5);
    add_part(r, "eq6_decomposition_defect", decomposition_defect, 1e-10);
    finish(r, timer);
    return r;
}

// --- 5: adjoint defect --------------------------------------------------------

AcceptanceResult acceptance_adjoint_defect() {
    AcceptanceResult r;
    r.id = 5;
    r.name = "adjoint-defect";
    Timer timer;

    auto b32 = shared_bundle(make_scheme(1, 32));
    auto b64 = shared_bundle(make_scheme(1, 64));

    const double t32 = b32->adjoint_defect_norm(0, RegularityIndex(1.0));
    const double t64 = b64->adjoint_defect_norm(0, RegularityIndex(1.0));
    const double d32 = b32->derivative_norm(0, RegularityIndex(1.0));
    const double d64 = b64->derivative_norm(0, RegularityIndex(1.0));

    add_part(r, "T64_over_T32", t64 / t32, 1.2);
    add_part(r, "D64_over_D32_lower", d64 / d32, 1.3, false);
    add_part(r, "D64_over_D32_upper", d64 / d32, 1.5);
    add_part(r, "q0_interior_defect", b64->adjoint_defect_norm(0, RegularityIndex(0.0)), 1e-12);
    finish(r, timer);
    return r;
}

// --- 6: explosion --------------------------------------------------------------

AcceptanceResult acceptance_explosion() {
    AcceptanceResult r;
    r.id = 6;
    r.name = "explosion";
    Timer timer;

    // classical quadratic blow-up
    auto square_drift = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square()); };
    auto zero_sigma = [](const Eigen::VectorXd& x) {
        return Eigen::MatrixXd(Eigen::MatrixXd::Zero(x.size(), 1));
    };
    Eigen::VectorXd x0(1);
    x0[0] = 1.0;
    const NoiseDriver driver(6, 1, 1e-4);
    Guards g3, g6;
    g3.R_explode = 1e3;
    g6.R_explode = 1e6;
    const FinitePath p3 = euler_maruyama(zero_sigma, square_drift, x0, 1e-4, 2.0, driver, 0, g3);
    const FinitePath p6 = euler_maruyama(zero_sigma, square_drift, x0, 1e-4, 2.0, driver, 0, g6);
    add_part(r, "eta_hat_R1e6_lower", p6.eta_hat, 0.95, false);
    add_part(r, "eta_hat_R1e6_upper", p6.eta_hat, 1.05);
    add_part(r, "guard_sensitivity", std::abs(p6.eta_hat - p3.eta_hat) / p6.eta_hat, 0.02);

    // lifted blow-up diagnostic: the norm monitor must fire on an exploded record
    {
        auto scheme = make_scheme(1, 64);
        const SpectralElement y = basis_element(scheme, {0});
        const NoiseDriver drv(16, 1, 1e-3);
        SolveOptions opts;
        opts.guards.R_explode = 8.0;
        const SolutionRecord rec =
            solve_translation(constant_field(0.1, 3.0), y, RegularityIndex(1.0),
                              RegularityIndex(1.0), 1e-3, 5.0, drv, 0, {0.0, 1.0}, opts);
        const BlowupMonitor mon = norm_blowup_monitor(rec);
        add_part(r, "blowup_monitor_triggered",
                 (mon.applicable && mon.triggered) ? 1.0 : 0.0, 1.0, false);
    }

    // Prop 5.2 control: bounded field, no explosions, rare large exits
    {
        auto scheme = make_scheme(1, 16);
        const SpectralElement y = basis_element(scheme, {0});
        const CoefficientField field = suite_field(scheme);
        const NoiseDriver drv(60, 1, 1e-3);
        const int paths = 1000;
        struct Tally {
            int exploded;
            int exited10;
        };
        const auto tallies = map_streams<Tally>(paths, [&](std::uint64_t s) {
            const FinitePath Z = characteristic_Z(field, y, 1e-3, 1.0, drv, s);
            Tally t{Z.status == PathStatus::exploded ? 1 : 0, 0};
            std::vector<double> norms;
            norms.reserve(Z.last_index() + 1);
            for (int m = 0; m <= Z.last_index(); ++m) {
                const SpectralElement Ym = translate(y, {Z.states(m, 0)});
                norms.push_back(sobolev_norm(Ym - y, RegularityIndex(0.0)));
            }
            if (first_crossing(norms, 1e-3, 10.0)) t.exited10 = 1;
            return t;
        });
        int exploded = 0, exited = 0;
        for (const auto& t : tallies) {
            exploded += t.exploded;
            exited += t.exited10;
        }
        add_part(r, "bounded_field_explosions", exploded, 0.0);
        add_part(r, "exit_fraction_radius10", static_cast<double>(exited) / paths, 1e-3);
    }
    finish(r, timer);
    return r;
}

// --- 7: Feynman-Kac -------------------------------------------------------------

AcceptanceResult acceptance_feynman_kac() {
    AcceptanceResult r;
    r.id = 7;
    r.name = "feynman-kac";
    r.runtime_limit = 180.0;
    Timer timer;

    // constant-potential identity: weighted/unweighted means differ by e^{ct} exactly
    {
        FeynmanKacConfig base;
        base.sigma = [](double x) { return 1.0 + 0.2 * std::sin(x); };
        base.drift = [](double x) { return 0.1 * std::cos(x); };
        base.V = [](double) { return 0.0; };
        base.f = [](double x) { return std::exp(-0.5 * x * x); };
        base.x_grid = {0.0};
        base.t = 0.5;
        base.dt = 1e-3;
        base.paths = 2000;
        base.seed = 7;
        base.use_fd_oracle = false;
        FeynmanKacConfig lifted = base;
        lifted.V = [](double) { return 0.5; };
        const Report r0 = run_feynman_kac(base);
        const Report rc = run_feynman_kac(lifted);
        const double u0 = r0.series[0].rows[0][1];
        const double uc = rc.series[0].rows[0][1];
        add_part(r, "constant_V_ratio_defect",
                 std::abs(uc - std::exp(0.25) * u0) / std::abs(uc), 1e-12);
    }

    // OU + quadratic potential against the Crank-Nicolson oracle
    {
        FeynmanKacConfig cfg;
        cfg.sigma = [](double) { return 1.0; };
        cfg.drift = [](double x) { return -x; };
        cfg.V = [](double x) { return -0.5 * x * x; };
        cfg.f = [](double x) { return std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x); };
        cfg.x_grid = {-2.0, -1.0, 0.0, 1.0, 2.0};
        cfg.t = 0.5;
        cfg.dt = 1e-3;
        cfg.paths = 50000;
        cfg.seed = 17;
        cfg.fd_points = 2048;
        cfg.fd_dt = 2.5e-4;
        cfg.tolerance_fraction = 0.01;
        const Report rep = run_feynman_kac(cfg);
        add_part(r, "fd_comparison_excess", rep.checks.at(0).measured, 0.0);
    }
    finish(r, timer);
    return r;
}

// --- 8: mollifier / martingale convergence ----------------------------------------

AcceptanceResult acceptance_mollifier() {
    AcceptanceResult r;
    r.id = 8;
    r.name = "mollifier-convergence";
    Timer timer;

    MollifierConfig cfg;
    cfg.sigma_bar = [](double z) { return 1.0 + 0.3 * std::sin(z); };
    cfg.drift_bar = [](double z) { return 0.2 * std::cos(z); };
    cfg.widths = {1.0, 0.5, 0.25, 0.125};
    cfg.x = 0.0;
    cfg.t = 1.0;
    cfg.dt = 1e-3;
    cfg.paths = 20000;
    cfg.seed = 8;
    cfg.quad_order = 16;
    const Report rep = run_mollifier_convergence(cfg);
    for (const auto& c : rep.checks) add_part(r, c.name, c.measured, c.tolerance);
    finish(r, timer);
    return r;
}

// --- 9: flow restart, duality, Fourier identity -------------------------------------

AcceptanceResult acceptance_flow_duality_fourier() {
    AcceptanceResult r;
    r.id = 9;
    r.name = "flow-duality-fourier";
    Timer timer;

    auto scheme = make_scheme(1, 24);
    const SpectralElement y = basis_element(scheme, {0});
    const CoefficientField field = suite_field(scheme);
    const NoiseDriver driver(9, 1, 1e-3);

    const FlowRestartResult flow =
        flow_restart_check(field, y, RegularityIndex(0.0), 0.25, 0.5, 1e-3, driver, 0);
    add_part(r, "restart_z_defect", flow.z_defect, 1e-10);

    const DualityResult dual = duality_check(field, y, y, 0.5, 64, 1e-3, driver);
    add_part(r, "max_per_path_duality_defect", dual.max_path_defect, 1e-6);

    double fourier_defect = 0.0;
    const SpectralElement Fy = fourier_transform(y);
    for (std::uint64_t s = 0; s < 8; ++s) {
        const SolutionRecord rec = solve_translation(field, y, RegularityIndex(1.0),
                                                     RegularityIndex(0.0), 1e-3, 0.5, driver, s,
                                                     {0.25, 0.5});
        for (std::size_t snap = 0; snap < rec.snapshots.size(); ++snap) {
            const double z = rec.Z.states(rec.grid_index(rec.snapshot_times[snap]), 0);
            const SpectralElement Fs = fourier_transform(rec.snapshots[snap]);
            for (int i = 0; i < 16; ++i) {
                const double xi = -3.0 + 6.0 * i / 15.0;
                const std::complex<double> lhs = evaluate_complex(Fs, {xi});
                const std::complex<double> rhs =
                    evaluate_complex(Fy, {xi}) * std::exp(std::complex<double>(0.0, -xi * z));
                fourier_defect = std::max(fourier_defect, std::abs(lhs - rhs));
            }
        }
    }
    add_part(r, "fourier_identity_defect_16freqs", fourier_defect, 1e-6);
    finish(r, timer);
    return r;
}

// --- 10: weak-null diagnostic ----------------------------------------------------

AcceptanceResult acceptance_weak_null() {
    AcceptanceResult r;
    r.id = 10;
    r.name = "weak-null";
    Timer timer;

    auto scheme = make_scheme(1, 24);
    const SpectralElement y = basis_element(scheme, {0});
    const CoefficientField field = constant_field(0.1, 3.0);
    const NoiseDriver driver(10, 1, 1e-3);
    const int paths = 200;

    const auto hits = map_streams<int>(paths, [&](std::uint64_t s) {
        SolveOptions opts;
        opts.diag_points = 9;  // the tail pairing is the point here
        const SolutionRecord rec = solve_translation(field, y, RegularityIndex(1.0),
                                                     RegularityIndex(0.0), 1e-3, 10.0, driver, s,
                                                     {10.0}, opts);
        if (rec.snapshots.empty()) return 0;
        const double pairing = std::abs(dual_pairing(rec.snapshots[0], y));
        const double absz = std::abs(rec.Z.states(rec.Z.last_index(), 0));
        return (pairing <= 1e-3 && absz >= 25.0) ? 1 : 0;
    });
    int good = 0;
    for (int h : hits) good += h;
    add_part(r, "fraction_null_and_far", static_cast<double>(good) / paths, 0.95, false);
    finish(r, timer);
    return r;
}

std::vector<AcceptanceResult> run_acceptance(const std::vector<int>& only) {
    using Fn = AcceptanceResult (*)();
    const Fn fns[] = {acceptance_route_equivalence,      acceptance_picard_decay,
                      acceptance_heat_representation,    acceptance_monotonicity_stability,
                      acceptance_adjoint_defect,         acceptance_explosion,
                      acceptance_feynman_kac,            acceptance_mollifier,
                      acceptance_flow_duality_fourier,   acceptance_weak_null};
    std::vector<AcceptanceResult> out;
    for (int id = 1; id <= 10; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        out.push_back(fns[id - 1]());
    }
    return out;
}

}  // namespace hermspde

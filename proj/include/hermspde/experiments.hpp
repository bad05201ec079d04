#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hermspde/coefficient_field.hpp"
#include "hermspde/solver.hpp"

namespace hermspde {

struct CheckItem {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// One experiment run: named checks (each with measured value and
/// tolerance), free-form metrics, and gnuplot-consumable series. write()
/// emits report.json, series_<name>.csv and the resolved config snapshot.
struct Report {
    std::string experiment;
    std::vector<CheckItem> checks;
    std::map<std::string, double> metrics;
    std::vector<Series> series;
    std::string config_json = "{}";

    bool passed() const;
    CheckItem& add_check(const std::string& name, double measured, double tolerance,
                         bool larger_fails = true);
    void write(const std::string& directory) const;
};

using Func1D = std::function<double(double)>;

/// Coefficients of the Gaussian convolution y * N(mean, cov) on the scheme
/// of y (the stochastic-representation comparator for the heat and evolution
/// runs). Quadrature order Q per axis.
SpectralElement gaussian_convolution(const SpectralElement& y, const Eigen::VectorXd& mean,
                                     const Eigen::MatrixXd& cov, int Q);

// ---------------------------------------------------------------------------
// Heat representation: E Y_t = y * p_{Z_t} for constant coefficients.
struct HeatConfig {
    CoefficientField field;  // must be constant
    SpectralElement y;
    double t = 0.5;
    double dt = 1e-3;
    int paths = 20000;
    std::uint64_t seed = 1;
    double abs_slack = 1e-6;  // per-coefficient pass: |err| <= 3 stderr + abs_slack
};
Report run_heat_check(const HeatConfig& config);

// ---------------------------------------------------------------------------
// Deterministic evolution d/dt Y = L(Y) by forward Euler in coefficient
// space, cross-checked against the Gaussian representation
// y * N(m(t), S(t)) with m, S accumulated along the trajectory, and against
// the self-consistent fixed point of that representation.
struct EvolutionConfig {
    CoefficientField field;
    SpectralElement y;
    double T = 0.25;
    double dt = 1e-4;
    double check_time = 0.25;
    double route_tolerance = 1e-3;
    double growth_guard = 1e3;  // abort when ||Y||_0 exceeds guard * ||y||_0
    int fixed_point_iterations = 30;
};
Report run_evolution(const EvolutionConfig& config);

// ---------------------------------------------------------------------------
// Feynman-Kac: u(t,x) = E[e^{int V(X_s) ds} f(X_t)] by weighted Euler paths,
// compared against a Crank-Nicolson finite-difference oracle.
struct FeynmanKacConfig {
    Func1D sigma;
    Func1D drift;
    Func1D V;  // bounded above
    Func1D f;
    std::vector<double> x_grid;
    double t = 0.5;
    double dt = 1e-3;
    int paths = 50000;
    std::uint64_t seed = 2;
    double exponent_guard = 50.0;

    bool use_fd_oracle = true;
    double fd_xmin = -8.0, fd_xmax = 8.0;
    int fd_points = 2048;
    double fd_dt = 2.5e-4;
    double tolerance_fraction = 0.01;  // |u_MC - u_FD| <= frac ||u_FD||_inf + 3 stderr
};
Report run_feynman_kac(const FeynmanKacConfig& config);

/// The oracle alone: Crank-Nicolson solve of
/// d_t u = 1/2 sigma^2 u_xx + b u_x + V u, u(0,.) = f, zero Dirichlet walls.
std::vector<double> crank_nicolson_oracle(const Func1D& sigma, const Func1D& drift,
                                          const Func1D& V, const Func1D& f, double t, double xmin,
                                          double xmax, int points, double dt);

// ---------------------------------------------------------------------------
// McKean-Vlasov interacting particles, law dependence through moments or a
// Gaussian kernel average: value = c0 + cx x + cmean E[X] + cm2 E[X^2]
//                                + ckernel (1/M) sum_j exp(-(x-X_j)^2 / 2w^2).
struct MeanFieldCoeff {
    double c0 = 0.0, cx = 0.0, cmean = 0.0, cm2 = 0.0;
    double ckernel = 0.0, kernel_width = 1.0;
    double operator()(double x, double mean, double m2,
                      const std::vector<double>& cloud) const;
};
struct MckeanVlasovConfig {
    MeanFieldCoeff sigma;
    MeanFieldCoeff drift;
    double x0 = 0.0;
    int particles = 1000;
    double T = 1.0;
    double dt = 1e-3;
    std::uint64_t seed = 3;
    double blowup_guard = 1e6;
    int snapshots = 21;

    // optional lifted evolution check of psi(t) = (1/M) sum tau_{X_i}(y)
    std::optional<SpectralElement> y;
    double psi_window = 0.05;       // central-difference half width
    double psi_tolerance = 0.5;     // relative defect allowed (MC-noisy check)
};
Report run_mckean_vlasov(const MckeanVlasovConfig& config);

// ---------------------------------------------------------------------------
// Martingale-problem / mollifier convergence: y_eps a normalized Gaussian of
// width eps (-> delta_0 weakly); the lifted coefficients <sigma_bar, tau_z
// y_eps> reduce to Gauss-Hermite averages around z; laws of x + Z^eps_t are
// compared against the classical SDE on shared streams.
struct MollifierConfig {
    Func1D sigma_bar;
    Func1D drift_bar;
    std::vector<double> widths = {1.0, 0.5, 0.25, 0.125};  // decreasing
    double x = 0.0;
    double t = 1.0;
    double dt = 1e-3;
    int paths = 20000;
    std::uint64_t seed = 4;
    int quad_order = 24;
    double bound_guard = 1e3;      // reject unbounded coefficient samples
    double final_tolerance = 5e-2;  // final mean/variance error <= tol + 3 stderr
};
Report run_mollifier_convergence(const MollifierConfig& config);

}  // namespace hermspde

#include "hermspde/sde.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hermspde {

std::string to_string(PathStatus s) {
    switch (s) {
        case PathStatus::completed: return "completed";
        case PathStatus::exited: return "exited";
        case PathStatus::exploded: return "exploded";
    }
    return "unknown";
}

void FinitePath::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const int d = static_cast<int>(states.cols());
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",X_" << i;
    out << ",status\n";
    char buf[40];
    const std::string status = to_string(this->status);
    for (int m = 0; m <= last_index(); ++m) {
        std::snprintf(buf, sizeof(buf), "%.17g", time(m));
        out << buf;
        for (int i = 0; i < d; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", states(m, i));
            out << ',' << buf;
        }
        out << ',' << status << '\n';
    }
}

namespace {

struct StepResult {
    bool stopped = false;
};

int step_count(double dt, double T) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(T >= dt)) throw std::invalid_argument("T must be at least dt");
    return static_cast<int>(std::llround(T / dt));
}

double interpolate_crossing(double t_prev, double dt, double g_prev, double g_next,
                            double threshold) {
    const double denom = g_next - g_prev;
    if (!(denom > 0.0)) return t_prev + dt;
    return t_prev + dt * std::min(1.0, std::max(0.0, (threshold - g_prev) / denom));
}

// Shared Euler driver loop; `coeffs(m, X_m, sigma, b)` fills the step-m
// coefficients and returns false if an evaluation was non-finite.
template <typename CoeffFn>
FinitePath euler_loop(int d, int n, const Eigen::VectorXd& x0, double dt, double T,
                      const NoiseDriver& driver, std::uint64_t stream, const Guards& guards,
                      CoeffFn&& coeffs, std::uint64_t step_offset = 0) {
    if (driver.dimension() != n)
        throw std::invalid_argument("noise driver dimension does not match the coefficients");
    if (std::abs(driver.dt() - dt) > 1e-15 * std::max(1.0, dt))
        throw std::invalid_argument("noise driver step size does not match dt");
    if (!x0.allFinite()) throw std::invalid_argument("initial state must be finite");

    const int M = step_count(dt, T);
    Eigen::MatrixXd states(M + 1, d);
    states.row(0) = x0;

    FinitePath path;
    path.dt = dt;
    path.status = PathStatus::completed;

    Eigen::MatrixXd sigma(d, n);
    Eigen::VectorXd b(d);
    int last = 0;
    for (int m = 0; m < M; ++m) {
        const Eigen::VectorXd X = states.row(m);
        if (!coeffs(m, X, sigma, b)) {
            path.status = PathStatus::exploded;
            path.eta_hat = m * dt;
            break;
        }
        const Eigen::VectorXd dB =
            driver.increment(stream, step_offset + static_cast<std::uint64_t>(m));
        const Eigen::VectorXd Xn = X + sigma * dB + b * dt;
        if (!Xn.allFinite()) {
            path.status = PathStatus::exploded;
            path.eta_hat = m * dt;
            break;
        }
        states.row(m + 1) = Xn;
        last = m + 1;

        if (Xn.norm() > guards.R_explode) {
            path.status = PathStatus::exploded;
            path.eta_hat = interpolate_crossing(m * dt, dt, X.norm(), Xn.norm(), guards.R_explode);
            break;
        }
        if (guards.ball) {
            const double g_prev = (X - guards.ball->center).norm();
            const double g_next = (Xn - guards.ball->center).norm();
            if (g_next > guards.ball->radius) {
                path.status = PathStatus::exited;
                path.exit_radius = guards.ball->radius;
                path.eta_hat =
                    interpolate_crossing(m * dt, dt, g_prev, g_next, guards.ball->radius);
                break;
            }
        }
    }
    path.states = states.topRows(last + 1);
    return path;
}

}  // namespace

FinitePath euler_maruyama(const StateCoefficients& sigma_fn, const StateDrift& b_fn,
                          const Eigen::VectorXd& x0, double dt, double T,
                          const NoiseDriver& driver, std::uint64_t stream, const Guards& guards) {
    const int d = static_cast<int>(x0.size());
    const int n = driver.dimension();
    return euler_loop(d, n, x0, dt, T, driver, stream, guards,
                      [&](int, const Eigen::VectorXd& X, Eigen::MatrixXd& sigma,
                          Eigen::VectorXd& b) {
                          sigma = sigma_fn(X);
                          b = b_fn(X);
                          return sigma.allFinite() && b.allFinite();
                      });
}

FinitePath characteristic_Z(const CoefficientField& field, const SpectralElement& y, double dt,
                            double T, const NoiseDriver& driver, std::uint64_t stream,
                            const Guards& guards, std::uint64_t step_offset) {
    const int d = field.state_dim();
    if (y.scheme()->dimension() != d)
        throw std::invalid_argument("characteristic_Z: state dimension mismatch");
    const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(d);
    return euler_loop(
        d, field.noise_dim(), z0, dt, T, driver, stream, guards,
        [&](int, const Eigen::VectorXd& Z, Eigen::MatrixXd& sigma, Eigen::VectorXd& b) {
            try {
                const Coefficients c = field.eval_translate(y, Z);
                sigma = c.sigma;
                b = c.b;
            } catch (const std::runtime_error&) {
                return false;  // non-finite evaluation => explosion
            }
            return true;
        },
        step_offset);
}

std::optional<double> first_crossing(const std::vector<double>& norms, double dt, double r) {
    for (std::size_t m = 0; m < norms.size(); ++m) {
        if (norms[m] > r) {
            if (m == 0) return 0.0;
            return interpolate_crossing((m - 1) * dt, dt, norms[m - 1], norms[m], r);
        }
    }
    return std::nullopt;
}

std::optional<double> exit_time(const std::vector<SpectralElement>& snapshots,
                                const SpectralElement& y, double r, RegularityIndex q,
                                double dt) {
    std::vector<double> norms;
    norms.reserve(snapshots.size());
    for (const auto& s : snapshots) norms.push_back(sobolev_norm(s - y, q));
    return first_crossing(norms, dt, r);
}

}  // namespace hermspde

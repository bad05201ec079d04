#include "hermspde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "hermspde/operators.hpp"
#include "hermspde/parallel.hpp"
#include "hermspde/quadrature.hpp"
#include "hermspde/translation.hpp"

namespace hermspde {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double sample_stderr(double sum, double sumsq, int n) {
    if (n < 2) return 0.0;
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, (sumsq / n - mean * mean) / (n - 1.0)));
}

}  // namespace

bool Report::passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

CheckItem& Report::add_check(const std::string& name, double measured, double tolerance,
                             bool larger_fails) {
    CheckItem item;
    item.name = name;
    item.measured = measured;
    item.tolerance = tolerance;
    item.pass = larger_fails ? measured <= tolerance : measured >= tolerance;
    checks.push_back(item);
    return checks.back();
}

void Report::write(const std::string& directory) const {
    namespace fs = std::filesystem;
    fs::create_directories(directory);

    nlohmann::json j;
    j["experiment"] = experiment;
    j["passed"] = passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back(
            {{"name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance},
             {"pass", c.pass}});
    j["metrics"] = metrics;
    j["series_files"] = nlohmann::json::array();
    for (const auto& s : series) j["series_files"].push_back("series_" + s.name + ".csv");

    std::ofstream out(fs::path(directory) / "report.json");
    out << j.dump(2) << '\n';

    std::ofstream cfg(fs::path(directory) / "config.json");
    cfg << config_json << '\n';

    for (const auto& s : series) {
        std::ofstream csv(fs::path(directory) / ("series_" + s.name + ".csv"));
        for (std::size_t c = 0; c < s.columns.size(); ++c)
            csv << s.columns[c] << (c + 1 < s.columns.size() ? "," : "\n");
        for (const auto& row : s.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                csv << fmt17(row[c]) << (c + 1 < row.size() ? "," : "\n");
        }
    }
}

SpectralElement gaussian_convolution(const SpectralElement& y, const Eigen::VectorXd& mean,
                                     const Eigen::MatrixXd& cov, int Q) {
    const int d = y.scheme()->dimension();
    if (mean.size() != d || cov.rows() != d || cov.cols() != d)
        throw std::invalid_argument("gaussian_convolution: dimension mismatch");

    std::vector<double> shift(mean.data(), mean.data() + d);
    if (cov.norm() < 1e-14) return translate(y, shift);

    // z = mean + sqrt(2) L s turns the Gaussian average into the e^{-s^2} rule
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::MatrixXd L =
        es.eigenvectors() *
        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    const QuadratureRule& rule = cached_gauss_hermite(Q);
    const double inv_norm = std::pow(M_PI, -0.5 * d);

    auto averaged = [&](const std::vector<double>& x) {
        std::vector<int> digit(d, 0);
        double acc = 0.0;
        while (true) {
            double w = inv_norm;
            Eigen::VectorXd s(d);
            for (int a = 0; a < d; ++a) {
                s[a] = rule.nodes[digit[a]];
                w *= rule.weights[digit[a]];
            }
            const Eigen::VectorXd z = mean + std::sqrt(2.0) * (L * s);
            std::vector<double> arg(d);
            for (int a = 0; a < d; ++a) arg[a] = x[a] - z[a];
            acc += w * evaluate(y, arg);
            int axis = 0;
            while (axis < d && ++digit[axis] == rule.order) digit[axis++] = 0;
            if (axis == d) break;
        }
        return acc;
    };
    return project_function(averaged, y.scheme(), Q);
}

// ---------------------------------------------------------------------------

Report run_heat_check(const HeatConfig& config) {
    if (!config.field.is_constant())
        throw std::invalid_argument(
            "run_heat_check: the closed-form comparator requires a constant field");
    Report report;
    report.experiment = "heat_check";

    const int n = config.y.size();
    if (config.t == 0.0) {  // E Y_0 = y with no dispersion
        report.add_check("every coefficient within 3 stderr + slack (excess)",
                         -config.abs_slack, 0.0);
        report.metrics["max_coefficient_error"] = 0.0;
        report.metrics["max_stderr"] = 0.0;
        return report;
    }
    const auto coeff_of_path = map_streams<Eigen::VectorXd>(config.paths, [&](std::uint64_t s) {
        const NoiseDriver driver(config.seed, config.field.noise_dim(), config.dt);
        const FinitePath Z =
            characteristic_Z(config.field, config.y, config.dt, config.t, driver, s);
        std::vector<double> z(config.field.state_dim());
        for (int i = 0; i < Z.states.cols(); ++i) z[i] = Z.states(Z.last_index(), i);
        return translate(config.y, z).coeffs();
    });

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n), sumsq = Eigen::VectorXd::Zero(n);
    for (const auto& c : coeff_of_path) {  // ascending stream order
        sum += c;
        sumsq += c.cwiseProduct(c);
    }
    const Eigen::VectorXd mc_mean = sum / config.paths;

    const Coefficients c0 = config.field.eval(config.y);
    const SpectralElement oracle = gaussian_convolution(
        config.y, Eigen::VectorXd(c0.b * config.t), Eigen::MatrixXd(c0.a * config.t),
        config.y.scheme()->degree_bound() + 8);

    double max_err = 0.0, max_excess = -1e300, max_se = 0.0;
    Series per_coeff{"coefficients", {"index", "mc_mean", "analytic", "stderr"}, {}};
    for (int k = 0; k < n; ++k) {
        const double se = sample_stderr(sum[k], sumsq[k], config.paths);
        const double err = std::abs(mc_mean[k] - oracle.coeffs()[k]);
        max_err = std::max(max_err, err);
        max_se = std::max(max_se, se);
        max_excess = std::max(max_excess, err - (3.0 * se + config.abs_slack));
        per_coeff.rows.push_back({static_cast<double>(k), mc_mean[k], oracle.coeffs()[k], se});
    }
    report.series.push_back(std::move(per_coeff));
    report.metrics["max_coefficient_error"] = max_err;
    report.metrics["max_stderr"] = max_se;
    report.add_check("every coefficient within 3 stderr + slack (excess)", max_excess, 0.0);
    return report;
}

// ---------------------------------------------------------------------------

namespace {

double operator_norm(const Eigen::SparseMatrix<double>& A) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(A)).singularValues()[0];
}

}  // namespace

Report run_evolution(const EvolutionConfig& config) {
    Report report;
    report.experiment = "evolution";
    const auto& y = config.y;
    const int d = config.field.state_dim();
    auto ops = shared_bundle(y.scheme());

    // spectral stability bound for the explicit step
    std::vector<double> d1(d), d2(d * d);
    for (int i = 0; i < d; ++i) d1[i] = operator_norm(ops->derivative(i));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) d2[i * d + j] = operator_norm(ops->second_derivative(i, j));
    const Coefficients at_start = config.field.eval(y);
    double rate = 0.0;
    for (int i = 0; i < d; ++i) {
        rate += std::abs(at_start.b[i]) * d1[i];
        for (int j = 0; j < d; ++j) rate += 0.5 * std::abs(at_start.a(i, j)) * d2[i * d + j];
    }
    const double dt_stable = rate > 0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
    report.metrics["dt_stability_bound"] = dt_stable;
    if (config.dt > dt_stable)
        throw std::invalid_argument("run_evolution: dt " + std::to_string(config.dt) +
                                    " exceeds the spectral stability bound " +
                                    std::to_string(dt_stable));

    const int M = static_cast<int>(std::llround(config.T / config.dt));
    const int check_idx = static_cast<int>(std::llround(config.check_time / config.dt));
    if (std::abs(config.check_time - check_idx * config.dt) > 1e-9)
        throw std::invalid_argument("run_evolution: check time off the grid");

    // forward Euler with trapezoid accumulation of b(Y) and a(Y)
    SpectralElement Y = y;
    Eigen::VectorXd m_acc = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd S_acc = Eigen::MatrixXd::Zero(d, d);
    Coefficients prev = at_start;
    const double norm0 = sobolev_norm(y, RegularityIndex(0.0));
    SpectralElement euler_at_check = y;
    Eigen::VectorXd m_at_check = m_acc;
    Eigen::MatrixXd S_at_check = S_acc;
    if (check_idx == 0) euler_at_check = Y;

    Series growth{"norm_evolution", {"t", "norm0"}, {}};
    for (int m = 0; m < M; ++m) {
        const FrozenResult frozen = apply_frozen(prev, Y);
        Y += config.dt * frozen.L;
        const double cur = sobolev_norm(Y, RegularityIndex(0.0));
        if (cur > config.growth_guard * std::max(norm0, 1e-30))
            throw std::runtime_error(
                "run_evolution: step instability, coefficient norm grew to " +
                std::to_string(cur) + " at t = " + std::to_string((m + 1) * config.dt));
        const Coefficients next = config.field.eval(Y);
        m_acc += 0.5 * config.dt * (prev.b + next.b);
        S_acc += 0.5 * config.dt * (prev.a + next.a);
        prev = next;
        if ((m + 1) % std::max(1, M / 32) == 0 || m + 1 == M)
            growth.rows.push_back({(m + 1) * config.dt, cur});
        if (m + 1 == check_idx) {
            euler_at_check = Y;
            m_at_check = m_acc;
            S_at_check = S_acc;
        }
    }
    report.series.push_back(std::move(growth));

    const int Q = y.scheme()->degree_bound() + 8;
    const SpectralElement trajectory_gaussian =
        gaussian_convolution(y, m_at_check, S_at_check, Q);
    const double err_traj =
        sobolev_norm(euler_at_check - trajectory_gaussian, RegularityIndex(0.0));
    report.add_check("euler vs trajectory Gaussian representation", err_traj,
                     config.route_tolerance);

    // self-consistent fixed point of the Gaussian representation on a coarse grid
    const int nodes = 64;
    const double h = config.check_time / nodes;
    std::vector<Eigen::VectorXd> mg(nodes + 1, Eigen::VectorXd::Zero(d));
    std::vector<Eigen::MatrixXd> Sg(nodes + 1, Eigen::MatrixXd::Zero(d, d));
    double drift_change = 0.0;
    for (int it = 0; it < config.fixed_point_iterations; ++it) {
        std::vector<Eigen::VectorXd> bs(nodes + 1);
        std::vector<Eigen::MatrixXd> as(nodes + 1);
        for (int j = 0; j <= nodes; ++j) {
            const SpectralElement Yj = gaussian_convolution(y, mg[j], Sg[j], Q);
            const Coefficients cj = config.field.eval(Yj);
            bs[j] = cj.b;
            as[j] = cj.a;
        }
        drift_change = 0.0;
        Eigen::VectorXd macc = Eigen::VectorXd::Zero(d);
        Eigen::MatrixXd sacc = Eigen::MatrixXd::Zero(d, d);
        for (int j = 0; j <= nodes; ++j) {
            if (j > 0) {
                macc += 0.5 * h * (bs[j - 1] + bs[j]);
                sacc += 0.5 * h * (as[j - 1] + as[j]);
            }
            drift_change = std::max(drift_change, (macc - mg[j]).norm() + (sacc - Sg[j]).norm());
            mg[j] = macc;
            Sg[j] = sacc;
        }
        if (drift_change < 1e-13) break;
    }
    report.metrics["fixed_point_residual"] = drift_change;
    const SpectralElement fp_at_check = gaussian_convolution(y, mg[nodes], Sg[nodes], Q);
    const double err_fp = sobolev_norm(euler_at_check - fp_at_check, RegularityIndex(0.0));
    report.add_check("euler vs self-consistent Gaussian fixed point", err_fp,
                     config.route_tolerance);
    return report;
}

// ---------------------------------------------------------------------------

std::vector<double> crank_nicolson_oracle(const Func1D& sigma, const Func1D& drift,
                                          const Func1D& V, const Func1D& f, double t, double xmin,
                                          double xmax, int points, double dt) {
    const double h = (xmax - xmin) / (points - 1);
    std::vector<double> x(points), u(points);
    for (int i = 0; i < points; ++i) {
        x[i] = xmin + i * h;
        u[i] = f(x[i]);
    }
    // generator rows: alpha u_{i-1} + beta u_i + gamma u_{i+1}
    std::vector<double> al(points), be(points), ga(points);
    for (int i = 1; i + 1 < points; ++i) {
        const double a = 0.5 * sigma(x[i]) * sigma(x[i]);
        const double b = drift(x[i]);
        al[i] = a / (h * h) - 0.5 * b / h;
        ga[i] = a / (h * h) + 0.5 * b / h;
        be[i] = -2.0 * a / (h * h) + V(x[i]);
    }
    const int steps = static_cast<int>(std::llround(t / dt));
    std::vector<double> rhs(points), low(points), diag(points), up(points), tmp(points);
    for (int s = 0; s < steps; ++s) {
        rhs[0] = 0.0;
        rhs[points - 1] = 0.0;
        for (int i = 1; i + 1 < points; ++i)
            rhs[i] = u[i] + 0.5 * dt * (al[i] * u[i - 1] + be[i] * u[i] + ga[i] * u[i + 1]);
        // (I - dt/2 A) u^{new} = rhs, zero Dirichlet walls
        diag[0] = 1.0;
        up[0] = 0.0;
        for (int i = 1; i + 1 < points; ++i) {
            low[i] = -0.5 * dt * al[i];
            diag[i] = 1.0 - 0.5 * dt * be[i];
            up[i] = -0.5 * dt * ga[i];
        }
        low[points - 1] = 0.0;
        diag[points - 1] = 1.0;
        // Thomas sweep
        tmp[0] = up[0] / diag[0];
        rhs[0] /= diag[0];
        for (int i = 1; i < points; ++i) {
            const double m = 1.0 / (diag[i] - low[i] * tmp[i - 1]);
            tmp[i] = up[i] * m;
            rhs[i] = (rhs[i] - low[i] * rhs[i - 1]) * m;
        }
        for (int i = points - 2; i >= 0; --i) rhs[i] -= tmp[i] * rhs[i + 1];
        u = rhs;
    }
    return u;
}

Report run_feynman_kac(const FeynmanKacConfig& config) {
    Report report;
    report.experiment = "feynman_kac";
    const int steps = static_cast<int>(std::llround(config.t / config.dt));

    std::vector<double> u_mc(config.x_grid.size()), u_se(config.x_grid.size());
    long divergent = 0;

    for (std::size_t ix = 0; ix < config.x_grid.size(); ++ix) {
        const double x0 = config.x_grid[ix];
        struct PathOut {
            double payoff;
            bool flagged;
        };
        const auto outs = map_streams<PathOut>(config.paths, [&](std::uint64_t s) {
            const NoiseDriver driver(config.seed, 1, config.dt);
            double X = x0;
            double expo = 0.5 * config.dt * config.V(X);  // trapezoid opening
            bool flagged = false;
            for (int m = 0; m < steps; ++m) {
                const double dB = driver.increment(s, m)[0];
                X += config.sigma(X) * dB + config.drift(X) * config.dt;
                const double w = (m + 1 == steps) ? 0.5 : 1.0;
                expo += w * config.dt * config.V(X);
                if (expo > config.exponent_guard) flagged = true;
            }
            return PathOut{std::exp(expo) * config.f(X), flagged};
        });
        double sum = 0, sumsq = 0;
        for (const auto& o : outs) {
            sum += o.payoff;
            sumsq += o.payoff * o.payoff;
            if (o.flagged) ++divergent;
        }
        u_mc[ix] = sum / config.paths;
        u_se[ix] = sample_stderr(sum, sumsq, config.paths);
    }
    report.metrics["divergent_weight_paths"] = static_cast<double>(divergent);

    Series vals{"u", {"x", "u_mc", "stderr"}, {}};
    for (std::size_t ix = 0; ix < config.x_grid.size(); ++ix)
        vals.rows.push_back({config.x_grid[ix], u_mc[ix], u_se[ix]});

    if (config.use_fd_oracle) {
        const std::vector<double> fd =
            crank_nicolson_oracle(config.sigma, config.drift, config.V, config.f, config.t,
                                  config.fd_xmin, config.fd_xmax, config.fd_points, config.fd_dt);
        double sup_fd = 0.0;
        for (double v : fd) sup_fd = std::max(sup_fd, std::abs(v));
        const double h = (config.fd_xmax - config.fd_xmin) / (config.fd_points - 1);
        double max_excess = -1e300;
        vals.columns.push_back("u_fd");
        for (std::size_t ix = 0; ix < config.x_grid.size(); ++ix) {
            const double pos = (config.x_grid[ix] - config.fd_xmin) / h;
            const int i0 = std::clamp(static_cast<int>(pos), 0, config.fd_points - 2);
            const double frac = pos - i0;
            const double u_fd = (1.0 - frac) * fd[i0] + frac * fd[i0 + 1];
            const double err = std::abs(u_mc[ix] - u_fd);
            max_excess = std::max(
                max_excess, err - (config.tolerance_fraction * sup_fd + 3.0 * u_se[ix]));
            vals.rows[ix].push_back(u_fd);
        }
        report.metrics["fd_sup_norm"] = sup_fd;
        report.add_check("|u_MC - u_FD| within fraction + 3 stderr (excess)", max_excess, 0.0);
    }
    report.series.push_back(std::move(vals));
    return report;
}

// ---------------------------------------------------------------------------

double MeanFieldCoeff::operator()(double x, double mean, double m2,
                                  const std::vector<double>& cloud) const {
    double v = c0 + cx * x + cmean * mean + cm2 * m2;
    if (ckernel != 0.0) {
        double acc = 0.0;
        const double inv2w2 = 1.0 / (2.0 * kernel_width * kernel_width);
        for (double xj : cloud) acc += std::exp(-(x - xj) * (x - xj) * inv2w2);
        v += ckernel * acc / static_cast<double>(cloud.size());
    }
    return v;
}

Report run_mckean_vlasov(const MckeanVlasovConfig& config) {
    Report report;
    report.experiment = "mckean_vlasov";
    const int M = config.particles;
    if (M < 1) throw std::invalid_argument("run_mckean_vlasov: need at least one particle");
    const int steps = static_cast<int>(std::llround(config.T / config.dt));
    const NoiseDriver driver(config.seed, 1, config.dt);

    std::vector<double> X(M, config.x0);

    Series moments{"moments", {"t", "mean", "variance", "third_central"}, {}};
    const int snap_stride = std::max(1, steps / std::max(1, config.snapshots - 1));
    auto record_moments = [&](int m) {
        double mean = std::accumulate(X.begin(), X.end(), 0.0) / M;
        double var = 0, third = 0;
        for (double xi : X) {
            var += (xi - mean) * (xi - mean);
            third += std::pow(xi - mean, 3);
        }
        moments.rows.push_back({m * config.dt, mean, M > 1 ? var / (M - 1) : 0.0, third / M});
    };
    record_moments(0);

    // lifted-average snapshots around the evolution-check center
    const double t_mid = 0.5 * config.T;
    const int mid_idx = static_cast<int>(std::llround(t_mid / config.dt));
    const int win = std::max(1, static_cast<int>(std::llround(config.psi_window / config.dt)));
    std::vector<double> cloud_before, cloud_center, cloud_after;

    std::vector<double> newX(M);
    for (int m = 0; m < steps; ++m) {
        double mean = std::accumulate(X.begin(), X.end(), 0.0) / M;
        double m2 = 0;
        for (double xi : X) m2 += xi * xi;
        m2 /= M;
        for (int i = 0; i < M; ++i) {
            const double dB = driver.increment(static_cast<std::uint64_t>(i), m)[0];
            newX[i] = X[i] + config.sigma(X[i], mean, m2, X) * dB +
                      config.drift(X[i], mean, m2, X) * config.dt;
            if (!std::isfinite(newX[i]) || std::abs(newX[i]) > config.blowup_guard)
                throw std::runtime_error("run_mckean_vlasov: particle blow-up at t = " +
                                         std::to_string((m + 1) * config.dt));
        }
        X.swap(newX);
        if ((m + 1) % snap_stride == 0 || m + 1 == steps) record_moments(m + 1);
        if (config.y) {
            if (m + 1 == mid_idx - win) cloud_before = X;
            if (m + 1 == mid_idx) cloud_center = X;
            if (m + 1 == mid_idx + win) cloud_after = X;
        }
    }
    report.series.push_back(moments);

    if (config.y && !cloud_before.empty() && !cloud_after.empty()) {
        // d/dt psi(t) vs the cloud-averaged frozen generator at the center
        const SpectralElement& y = *config.y;
        auto ops = shared_bundle(y.scheme());
        auto cloud_average = [&](const std::vector<double>& cloud) {
            SpectralElement acc(y.scheme());
            for (double xi : cloud) acc += translate(y, {xi});
            return (1.0 / cloud.size()) * acc;
        };
        const SpectralElement psi_before = cloud_average(cloud_before);
        const SpectralElement psi_after = cloud_average(cloud_after);
        const SpectralElement lhs =
            (1.0 / (2.0 * win * config.dt)) * (psi_after - psi_before);

        double mean = std::accumulate(cloud_center.begin(), cloud_center.end(), 0.0) / M;
        double m2 = 0;
        for (double xi : cloud_center) m2 += xi * xi;
        m2 /= M;
        SpectralElement rhs(y.scheme());
        for (double xi : cloud_center) {
            const SpectralElement yi = translate(y, {xi});
            const double s = config.sigma(xi, mean, m2, cloud_center);
            const double b = config.drift(xi, mean, m2, cloud_center);
            rhs += 0.5 * s * s * ops->apply_second_derivative(0, 0, yi) -
                   b * ops->apply_derivative(0, yi);
        }
        rhs *= 1.0 / M;
        const double scale = std::max(sobolev_norm(rhs, RegularityIndex(0.0)), 1e-12);
        const double defect = sobolev_norm(lhs - rhs, RegularityIndex(0.0)) / scale;
        report.add_check("lifted evolution identity (relative defect)", defect,
                         config.psi_tolerance);
    }

    const auto& last = moments.rows.back();
    report.metrics["final_mean"] = last[1];
    report.metrics["final_variance"] = last[2];
    return report;
}

// ---------------------------------------------------------------------------

Report run_mollifier_convergence(const MollifierConfig& config) {
    Report report;
    report.experiment = "mollifier_convergence";
    for (std::size_t i = 1; i < config.widths.size(); ++i)
        if (!(config.widths[i] < config.widths[i - 1]))
            throw std::invalid_argument("run_mollifier_convergence: widths must decrease");

    // bounded-coefficient sample check
    for (int i = 0; i <= 512; ++i) {
        const double z = -50.0 + 100.0 * i / 512.0;
        if (std::abs(config.sigma_bar(z)) > config.bound_guard ||
            std::abs(config.drift_bar(z)) > config.bound_guard)
            throw std::invalid_argument(
                "run_mollifier_convergence: coefficient sample exceeds the bound guard");
    }

    const int steps = static_cast<int>(std::llround(config.t / config.dt));
    const QuadratureRule& rule = cached_gauss_hermite(config.quad_order);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);

    auto run_ensemble = [&](const Func1D& sig, const Func1D& dri) {
        return map_streams<double>(config.paths, [&](std::uint64_t s) {
            const NoiseDriver driver(config.seed, 1, config.dt);
            double X = config.x;
            for (int m = 0; m < steps; ++m) {
                const double dB = driver.increment(s, m)[0];
                X += sig(X) * dB + dri(X) * config.dt;
            }
            return X;
        });
    };

    const std::vector<double> classical = run_ensemble(config.sigma_bar, config.drift_bar);
    auto moments_of = [](const std::vector<double>& xs) {
        const int n = static_cast<int>(xs.size());
        double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        double var = 0, third = 0;
        for (double v : xs) {
            var += (v - mean) * (v - mean);
            third += std::pow(v - mean, 3);
        }
        return std::array<double, 3>{mean, var / (n - 1), third / n};
    };
    const auto mc = moments_of(classical);

    // classical sample quantiles as the 5 CDF probes
    std::vector<double> sorted = classical;
    std::sort(sorted.begin(), sorted.end());
    std::array<double, 5> probes;
    for (int i = 0; i < 5; ++i)
        probes[i] = sorted[static_cast<std::size_t>((0.1 + 0.2 * i) * (sorted.size() - 1))];
    auto cdf_at = [](const std::vector<double>& xs, double p) {
        long c = 0;
        for (double v : xs)
            if (v <= p) ++c;
        return static_cast<double>(c) / xs.size();
    };

    Series errs{"errors",
                {"eps", "mean_error", "variance_error", "third_moment_error", "max_cdf_error",
                 "paired_stderr"},
                {}};
    std::vector<double> mean_errors, var_errors, slacks;
    for (double eps : config.widths) {
        const double scale = std::sqrt(2.0) * eps;
        auto lift = [scale, &rule, inv_sqrt_pi](Func1D g) {
            return Func1D([g = std::move(g), scale, &rule, inv_sqrt_pi](double z) {
                double acc = 0.0;
                for (int i = 0; i < rule.order; ++i)
                    acc += rule.weights[i] * g(z + scale * rule.nodes[i]);
                return acc * inv_sqrt_pi;
            });
        };
        const std::vector<double> lifted = run_ensemble(lift(config.sigma_bar),
                                                        lift(config.drift_bar));
        const auto me = moments_of(lifted);

        // paired per-stream differences give the slack scale
        double dsum = 0, dsumsq = 0;
        for (std::size_t i = 0; i < lifted.size(); ++i) {
            const double d = lifted[i] - classical[i];
            dsum += d;
            dsumsq += d * d;
        }
        const double paired_se = sample_stderr(dsum, dsumsq, config.paths);

        double cdf_err = 0.0;
        for (double p : probes)
            cdf_err = std::max(cdf_err, std::abs(cdf_at(lifted, p) - cdf_at(classical, p)));

        mean_errors.push_back(std::abs(me[0] - mc[0]));
        var_errors.push_back(std::abs(me[1] - mc[1]));
        slacks.push_back(paired_se);
        errs.rows.push_back({eps, mean_errors.back(), var_errors.back(),
                             std::abs(me[2] - mc[2]), cdf_err, paired_se});
    }
    report.series.push_back(errs);

    double worst_ladder = -1e300;
    for (std::size_t i = 1; i < config.widths.size(); ++i) {
        worst_ladder =
            std::max(worst_ladder, mean_errors[i] - (mean_errors[i - 1] + slacks[i - 1]));
        worst_ladder =
            std::max(worst_ladder, var_errors[i] - (var_errors[i - 1] + slacks[i - 1]));
    }
    report.add_check("error ladder nonincreasing up to 1 stderr (excess)", worst_ladder, 0.0);
    report.add_check("final mean error", mean_errors.back(),
                     config.final_tolerance + 3.0 * slacks.back());
    report.add_check("final variance error", var_errors.back(),
                     config.final_tolerance + 3.0 * slacks.back());
    report.metrics["final_mean_error"] = mean_errors.back();
    report.metrics["final_variance_error"] = var_errors.back();
    return report;
}

}  // namespace hermspde

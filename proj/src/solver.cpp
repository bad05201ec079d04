#include "hermspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "hermspde/operators.hpp"
#include "hermspde/parallel.hpp"

namespace hermspde {

namespace {

int nearest_grid_index(double t, double dt, int last_index) {
    const double raw = t / dt;
    const int idx = static_cast<int>(std::llround(raw));
    if (std::abs(raw - idx) > 1e-8)
        throw std::invalid_argument("time " + std::to_string(t) + " is not on the grid");
    if (idx < 0 || idx > last_index)
        throw std::invalid_argument("time " + std::to_string(t) + " is outside the path");
    return idx;
}

std::vector<double> row_to_vec(const Eigen::MatrixXd& states, int m) {
    std::vector<double> z(states.cols());
    for (int i = 0; i < states.cols(); ++i) z[i] = states(m, i);
    return z;
}

SpectralElement materialize(const SpectralElement& y, const FinitePath& Z, int m,
                            const TranslationOptions& opts) {
    return translate(y, row_to_vec(Z.states, m), opts);
}

// Thinned diagnostic indices: ~count points over [0, last], final index
// always included. The blow-up monitor reads the last ten entries of this
// recorded series.
std::vector<int> diagnostic_indices(int last, int count) {
    std::set<int> idx;
    const int stride = std::max(1, last / std::max(1, count - 1));
    for (int m = 0; m <= last; m += stride) idx.insert(m);
    idx.insert(last);
    return {idx.begin(), idx.end()};
}

}  // namespace

int SolutionRecord::grid_index(double t) const {
    return nearest_grid_index(t, dt, Z.last_index());
}

SolutionRecord solve_translation(const CoefficientField& field, const SpectralElement& y,
                                 RegularityIndex p, RegularityIndex q, double dt, double T,
                                 const NoiseDriver& driver, std::uint64_t stream,
                                 const std::vector<double>& snapshot_times,
                                 const SolveOptions& options) {
    SolutionRecord rec;
    rec.field_id = field_hash(field);
    rec.y = y;
    rec.p = p.p;
    rec.q = q.p;
    rec.dt = dt;
    rec.T = T;
    rec.seed = driver.seed();
    rec.stream = stream;
    rec.noise_dim = field.noise_dim();
    rec.noise_coarsen = driver.coarsen();

    rec.Z = characteristic_Z(field, y, dt, T, driver, stream, options.guards);
    rec.status = rec.Z.status;
    rec.eta_hat = rec.Z.eta_hat;

    const int last = rec.Z.last_index();
    for (double t : snapshot_times) {
        const double raw = t / dt;
        const int idx = static_cast<int>(std::llround(raw));
        if (std::abs(raw - idx) > 1e-8)
            throw std::invalid_argument("snapshot time " + std::to_string(t) +
                                        " is not on the grid");
        if (idx > last) continue;  // snapshots absent after eta
        SpectralElement snap = materialize(y, rec.Z, idx, options.translation);
        SnapshotDiagnostics diag;
        diag.t = idx * dt;
        diag.norm_p = sobolev_norm(snap, p);
        diag.dist_q = sobolev_norm(snap - y, q);
        rec.snapshot_times.push_back(diag.t);
        rec.snapshots.push_back(std::move(snap));
        rec.diagnostics.push_back(diag);
    }

    for (int m : diagnostic_indices(last, options.diag_points)) {
        const SpectralElement Ym = materialize(y, rec.Z, m, options.translation);
        rec.dist_times.push_back(m * dt);
        rec.dist_series.push_back(sobolev_norm(Ym - y, q));
    }
    return rec;
}

PicardRecord solve_picard(const CoefficientField& field, const SpectralElement& y,
                          RegularityIndex q, double r, int k_max, double dt, double T,
                          const NoiseDriver& driver, std::uint64_t stream,
                          const std::vector<double>& snapshot_times, double tolerance,
                          const SolveOptions& options) {
    if (!(r > 0.0)) throw std::invalid_argument("solve_picard: radius must be positive");
    if (k_max < 1) throw std::invalid_argument("solve_picard: k_max must be >= 1");

    PicardRecord rec;
    rec.k_max = k_max;
    rec.r = r;
    rec.dt = dt;
    rec.T = T;
    rec.q = q.p;
    rec.snapshot_times = snapshot_times;

    const int M = static_cast<int>(std::llround(T / dt));
    const int d = field.state_dim();

    // Per-iterate discrete freeze index: the first grid step at which
    // ||Y^k - y||_q crossed r, infinity while no iterate has crossed.
    int freeze_index = M + 1;  // eta^0 = infinity

    // Z^0 freezes the coefficients at Y^0 = y.
    std::vector<Eigen::MatrixXd> zpaths;
    {
        const Coefficients c0 = field.eval(y);
        Eigen::MatrixXd Z0(M + 1, d);
        Z0.row(0).setZero();
        for (int m = 0; m < M; ++m)
            Z0.row(m + 1) = Z0.row(m) +
                            (c0.sigma * driver.increment(stream, m) + c0.b * dt).transpose();
        zpaths.push_back(std::move(Z0));
    }

    for (int k = 1; k <= k_max; ++k) {
        const Eigen::MatrixXd& Zprev = zpaths.back();  // generates Y^k = tau_{Z^{k-1}}(y)

        // sigma_k from the unstopped norm series of Y^k.
        std::vector<double> norms(M + 1);
        for (int m = 0; m <= M; ++m) {
            const SpectralElement Ym =
                translate(y, row_to_vec(Zprev, m), options.translation);
            norms[m] = sobolev_norm(Ym - y, q);
        }
        const auto sigma_k = first_crossing(norms, dt, r);
        rec.sigma_exit.push_back(sigma_k ? *sigma_k : std::numeric_limits<double>::infinity());
        const double eta_k =
            std::min(rec.eta.empty() ? std::numeric_limits<double>::infinity() : rec.eta.back(),
                     rec.sigma_exit.back());
        rec.eta.push_back(eta_k);

        int crossed = M + 1;
        for (int m = 0; m <= M; ++m)
            if (norms[m] > r) {
                crossed = m;
                break;
            }
        freeze_index = std::min(freeze_index, crossed);

        if (k == k_max) break;  // Z^{k_max} is never consumed

        // Z^k with coefficients frozen at Y^k_{s ^ eta^k}.
        Eigen::MatrixXd Zk(M + 1, d);
        Zk.row(0).setZero();
        Coefficients frozen;
        bool have_frozen = false;
        for (int m = 0; m < M; ++m) {
            const int mf = std::min(m, freeze_index);
            if (mf == freeze_index && have_frozen) {
                // stopped: coefficients constant from here on
            } else {
                frozen = field.eval_translate(
                    y, Eigen::VectorXd(Zprev.row(mf).transpose()));
                have_frozen = (mf == freeze_index);
            }
            Zk.row(m + 1) =
                Zk.row(m) + (frozen.sigma * driver.increment(stream, m) + frozen.b * dt).transpose();
        }
        zpaths.push_back(std::move(Zk));
    }

    // Error curves at t ^ eta with eta = eta^{k_max}.
    const double eta_final = rec.eta.back();
    auto stopped_index = [&](double t) {
        const int idx = nearest_grid_index(t, dt, M);
        const int stop =
            std::isfinite(eta_final) ? static_cast<int>(std::floor(eta_final / dt)) : M;
        return std::min(idx, stop);
    };

    rec.error_curve.assign(k_max, {});
    for (double t : snapshot_times) {
        const int idx = stopped_index(t);
        SpectralElement prev = y;  // Y^0
        for (int k = 1; k <= k_max; ++k) {
            const SpectralElement Yk =
                translate(y, row_to_vec(zpaths[k - 1], idx), options.translation);
            rec.error_curve[k - 1].push_back(sobolev_norm(Yk - prev, q));
            prev = Yk;
        }
        rec.final_snapshots.push_back(std::move(prev));
    }

    for (auto& zp : zpaths) {
        FinitePath path;
        path.dt = dt;
        path.states = zp;
        path.status = PathStatus::completed;
        rec.Z.push_back(std::move(path));
    }

    rec.final_error = 0.0;
    for (double e : rec.error_curve.back()) rec.final_error = std::max(rec.final_error, e);
    rec.converged = rec.final_error <= tolerance;
    return rec;
}

std::vector<double> spde_residual(const CoefficientField& field, const SolutionRecord& record,
                                  RegularityIndex q) {
    const NoiseDriver driver(record.seed, record.noise_dim, record.dt / record.noise_coarsen,
                             record.noise_coarsen);
    const int last = record.Z.last_index();

    std::vector<int> snap_idx;
    for (double t : record.snapshot_times) snap_idx.push_back(record.grid_index(t));

    std::vector<double> out(snap_idx.size(), 0.0);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(record.y.size());
    int next = 0;
    for (int m = 0; m <= last && next < static_cast<int>(snap_idx.size()); ++m) {
        // emit residuals for snapshots at index m before advancing the sums
        while (next < static_cast<int>(snap_idx.size()) && snap_idx[next] == m) {
            const SpectralElement Ym =
                translate(record.y, row_to_vec(record.Z.states, m), TranslationOptions{});
            const SpectralElement defect =
                Ym - record.y - SpectralElement(record.y.scheme(), acc);
            out[next++] = sobolev_norm(defect, q);
        }
        if (m == last) break;
        const SpectralElement Ym =
            translate(record.y, row_to_vec(record.Z.states, m), TranslationOptions{});
        const Coefficients cm = field.eval_translate(
            record.y, Eigen::VectorXd(record.Z.states.row(m).transpose()));
        const FrozenResult ops = apply_frozen(cm, Ym);
        acc += ops.L.coeffs() * record.dt;
        const Eigen::VectorXd dB = driver.increment(record.stream, m);
        for (int j = 0; j < record.noise_dim; ++j) acc += ops.A[j].coeffs() * dB[j];
    }
    if (next < static_cast<int>(snap_idx.size()))
        throw std::invalid_argument("spde_residual: record not completed to every snapshot");
    return out;
}

FlowRestartResult flow_restart_check(const CoefficientField& field, const SpectralElement& y,
                                     RegularityIndex q, double s, double T, double dt,
                                     const NoiseDriver& driver, std::uint64_t stream,
                                     const SolveOptions& options) {
    if (!(s >= 0.0) || !(s < T))
        throw std::invalid_argument("flow_restart_check: need 0 <= s < T");
    const int M = static_cast<int>(std::llround(T / dt));
    const int ms = nearest_grid_index(s, dt, M);  // throws when s is off-grid

    const FinitePath full = characteristic_Z(field, y, dt, T, driver, stream, options.guards);
    if (full.status != PathStatus::completed)
        throw std::runtime_error("flow_restart_check: full path stopped before T");

    const Eigen::VectorXd Zs = full.states.row(ms);
    const SpectralElement y_restart = translate(y, row_to_vec(full.states, ms), options.translation);
    const FinitePath rest = characteristic_Z(field, y_restart, dt, T - s, driver, stream,
                                             options.guards, static_cast<std::uint64_t>(ms));
    if (rest.status != PathStatus::completed)
        throw std::runtime_error("flow_restart_check: restarted path stopped early");

    FlowRestartResult res;
    for (int m = 0; m <= rest.last_index(); ++m) {
        const Eigen::VectorXd delta =
            full.states.row(ms + m).transpose() - (Zs + rest.states.row(m).transpose());
        res.z_defect = std::max(res.z_defect, delta.norm());
    }
    // q-norm defect of the Y's at a handful of probe times
    const int probes = 8;
    for (int i = 1; i <= probes; ++i) {
        const int m = (rest.last_index() * i) / probes;
        const SpectralElement Yfull =
            translate(y, row_to_vec(full.states, ms + m), options.translation);
        const SpectralElement Yrest =
            translate(y_restart, row_to_vec(rest.states, m), options.translation);
        res.y_defect = std::max(res.y_defect, sobolev_norm(Yfull - Yrest, q));
    }
    return res;
}

DualityResult duality_check(const CoefficientField& field, const SpectralElement& y,
                            const SpectralElement& f, double t, int ensemble, double dt,
                            const NoiseDriver& driver, const SolveOptions& options) {
    if (ensemble < 1) throw std::invalid_argument("duality_check: ensemble size must be >= 1");
    require_same_scheme(y, f);

    if (t == 0.0) {  // Z_0 = 0: both sides are <y, f> with no dispersion
        DualityResult res;
        res.lhs = res.rhs = dual_pairing(y, f);
        return res;
    }

    struct PathValue {
        double lhs, rhs;
    };
    const auto values = map_streams<PathValue>(ensemble, [&](std::uint64_t stream) {
        const FinitePath Z = characteristic_Z(field, y, dt, t, driver, stream, options.guards);
        if (Z.status != PathStatus::completed)
            throw std::runtime_error("duality_check: path stopped before t");
        std::vector<double> z = row_to_vec(Z.states, Z.last_index());
        std::vector<double> neg(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) neg[i] = -z[i];
        const double rhs = dual_pairing(translate(y, z, options.translation), f);
        const double lhs = dual_pairing(y, translate(f, neg, options.translation));
        return PathValue{lhs, rhs};
    });

    DualityResult res;
    double sl = 0, sl2 = 0, sr = 0, sr2 = 0;
    for (const auto& v : values) {
        sl += v.lhs;
        sl2 += v.lhs * v.lhs;
        sr += v.rhs;
        sr2 += v.rhs * v.rhs;
        res.max_path_defect = std::max(res.max_path_defect, std::abs(v.lhs - v.rhs));
    }
    const double M = ensemble;
    res.lhs = sl / M;
    res.rhs = sr / M;
    if (ensemble > 1) {
        res.lhs_stderr = std::sqrt(std::max(0.0, (sl2 / M - res.lhs * res.lhs) / (M - 1)));
        res.rhs_stderr = std::sqrt(std::max(0.0, (sr2 / M - res.rhs * res.rhs) / (M - 1)));
    }
    return res;
}

WeakNullSeries weak_null_diagnostic(const SolutionRecord& record,
                                    const std::vector<SpectralElement>& test_elements) {
    WeakNullSeries out;
    out.times = record.snapshot_times;
    out.pairings.resize(test_elements.size());
    for (std::size_t s = 0; s < record.snapshots.size(); ++s) {
        const int m = record.grid_index(record.snapshot_times[s]);
        out.abs_z.push_back(record.Z.states.row(m).norm());
        for (std::size_t i = 0; i < test_elements.size(); ++i)
            out.pairings[i].push_back(dual_pairing(record.snapshots[s], test_elements[i]));
    }
    return out;
}

BlowupMonitor norm_blowup_monitor(const SolutionRecord& record) {
    BlowupMonitor mon;
    mon.applicable = record.status == PathStatus::exploded;
    if (!mon.applicable) return mon;
    const auto& series = record.dist_series;
    if (series.size() < 11) return mon;
    const std::size_t tail = series.size() - 10;
    bool nondecreasing = true;
    for (std::size_t i = tail; i + 1 < series.size(); ++i)
        if (series[i + 1] < series[i]) nondecreasing = false;
    double earlier_max = 0.0;
    for (std::size_t i = 0; i < tail; ++i) earlier_max = std::max(earlier_max, series[i]);
    mon.triggered = nondecreasing && series.back() > earlier_max;
    return mon;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_record(const SolutionRecord& record, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);

    record.Z.write_csv((fs::path(directory) / "z_path.csv").string());

    nlohmann::json manifest;
    manifest["field_hash"] = record.field_id;
    manifest["p"] = record.p;
    manifest["q"] = record.q;
    manifest["seed"] = record.seed;
    manifest["stream"] = record.stream;
    manifest["grid"] = {{"dt", record.dt}, {"T", record.T}, {"steps", record.Z.last_index()}};
    manifest["status"] = to_string(record.status);
    manifest["eta_hat"] = std::isfinite(record.eta_hat) ? nlohmann::json(record.eta_hat)
                                                        : nlohmann::json(nullptr);
    manifest["y"] = nlohmann::json::parse(element_to_json(record.y));

    nlohmann::json snaps = nlohmann::json::array();
    const int d = record.y.scheme()->dimension();
    for (std::size_t s = 0; s < record.snapshots.size(); ++s) {
        const std::string name = "snapshot_" + std::to_string(s) + ".csv";
        std::ofstream csv(fs::path(directory) / name);
        for (int i = 1; i <= d; ++i) csv << "k_" << i << (i < d ? "," : ",c\n");
        if (d == 0) csv << "c\n";
        const auto& scheme = *record.snapshots[s].scheme();
        for (int i = 0; i < scheme.size(); ++i) {
            for (int a = 0; a < d; ++a) csv << scheme.index(i)[a] << ',';
            csv << fmt17(record.snapshots[s].coeffs()[i]) << '\n';
        }
        snaps.push_back({{"t", record.snapshot_times[s]},
                         {"coeffs_ref", name},
                         {"norm_p", record.diagnostics[s].norm_p},
                         {"dist_q", record.diagnostics[s].dist_q}});
    }
    manifest["snapshots"] = snaps;

    nlohmann::json diag;
    diag["dist_times"] = record.dist_times;
    diag["dist_series"] = record.dist_series;
    manifest["diagnostics"] = diag;

    std::ofstream out(fs::path(directory) / "manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace hermspde

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hermspde/coefficient_field.hpp"
#include "hermspde/sde.hpp"
#include "hermspde/translation.hpp"

namespace hermspde {

struct SnapshotDiagnostics {
    double t = 0.0;
    double norm_p = 0.0;  // ||Y_t||_p
    double dist_q = 0.0;  // ||Y_t - y||_q
};

/// Artifact of one translation-route solve: the characteristic path Z, the
/// materialized snapshots Y_t = tau_{Z_t}(y), and per-step distance
/// diagnostics (thinned, plus the final ten steps so the blow-up monitor has
/// the tail).
struct SolutionRecord {
    std::string field_id;
    SpectralElement y;
    double p = 1.0;
    double q = 0.0;
    double dt = 0.0;
    double T = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    int noise_dim = 1;
    int noise_coarsen = 1;

    FinitePath Z;
    PathStatus status = PathStatus::completed;
    double eta_hat = std::numeric_limits<double>::infinity();

    std::vector<double> snapshot_times;
    std::vector<SpectralElement> snapshots;  // absent after eta
    std::vector<SnapshotDiagnostics> diagnostics;

    std::vector<double> dist_times;   // thinned grid diagnostics
    std::vector<double> dist_series;  // ||Y_t - y||_q at dist_times

    int grid_index(double t) const;
};

struct SolveOptions {
    Guards guards;
    int diag_points = 129;
    TranslationOptions translation;
};

/// Translation route (the closed-form construction): runs the characteristic
/// SDE for Z, then materializes Y_t = tau_{Z_t}(y) at the snapshot times.
SolutionRecord solve_translation(const CoefficientField& field, const SpectralElement& y,
                                 RegularityIndex p, RegularityIndex q, double dt, double T,
                                 const NoiseDriver& driver, std::uint64_t stream,
                                 const std::vector<double>& snapshot_times,
                                 const SolveOptions& options = {});

/// Picard-route record: per-iterate characteristic paths Z^k, ball-exit
/// stopping times sigma_j and eta^k = sigma_1 ^ ... ^ sigma_k, and the error
/// curves e_k(t) = ||Y^k_{t^eta} - Y^{k-1}_{t^eta}||_q with eta = eta^{k_max}.
struct PicardRecord {
    int k_max = 0;
    double r = 0.0;
    double dt = 0.0;
    double T = 0.0;
    double q = 0.0;

    std::vector<FinitePath> Z;         // Z^0 .. Z^{k_max-1}; Y^k = tau_{Z^{k-1}}(y)
    std::vector<double> sigma_exit;    // sigma_1 .. sigma_{k_max} (inf when no exit)
    std::vector<double> eta;           // eta^1 .. eta^{k_max}, nonincreasing in k
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> error_curve;  // [k-1][snap] = e_k at t ^ eta
    std::vector<SpectralElement> final_snapshots;  // Y^{k_max} at t ^ eta

    bool converged = false;
    double final_error = 0.0;
};

/// Modified Picard scheme: Y^0 = y; for k >= 1 the linearized equation with
/// coefficients frozen at Y^{k-1}_{s ^ eta^{k-1}} is solved in closed form as
/// Y^k = tau_{Z^{k-1}}(y). Reaching k_max with the error above tolerance
/// flags non-convergence; it is not an error.
PicardRecord solve_picard(const CoefficientField& field, const SpectralElement& y,
                          RegularityIndex q, double r, int k_max, double dt, double T,
                          const NoiseDriver& driver, std::uint64_t stream,
                          const std::vector<double>& snapshot_times, double tolerance = 1e-6,
                          const SolveOptions& options = {});

/// || Y_t - y - sum_m L(Y_{t_m}) dt - sum_{j,m} A_j(Y_{t_m}) dB^j_m ||_q per
/// snapshot, using the record's own increments and its grid states.
std::vector<double> spde_residual(const CoefficientField& field, const SolutionRecord& record,
                                  RegularityIndex q);

struct FlowRestartResult {
    double z_defect = 0.0;  // max_t |Z_full(s+t) - (Z_s + Z_restart(t))|
    double y_defect = 0.0;  // max over probe times of ||Y_full - Y_restart||_q
};

/// Restarts the solve at time s from tau_{Z_s}(y) with the remaining
/// increments of the same driver; the Euler recursion satisfies the flow
/// property exactly, so the defect measures floating-point accumulation only.
FlowRestartResult flow_restart_check(const CoefficientField& field, const SpectralElement& y,
                                     RegularityIndex q, double s, double T, double dt,
                                     const NoiseDriver& driver, std::uint64_t stream,
                                     const SolveOptions& options = {});

struct DualityResult {
    double lhs = 0.0;  // E <y, tau_{-Z_t} f>
    double rhs = 0.0;  // E <tau_{Z_t} y, f>
    double lhs_stderr = 0.0;
    double rhs_stderr = 0.0;
    double max_path_defect = 0.0;  // max_path |<tau_Z y, f> - <y, tau_{-Z} f>|
};

DualityResult duality_check(const CoefficientField& field, const SpectralElement& y,
                            const SpectralElement& f, double t, int ensemble, double dt,
                            const NoiseDriver& driver, const SolveOptions& options = {});

struct WeakNullSeries {
    std::vector<double> times;
    std::vector<double> abs_z;                   // |Z_t|
    std::vector<std::vector<double>> pairings;   // [element][time] = <Y_t, f_i>
};

/// Paired series of |Z_t| growth and <Y_t, f_i> decay (the weak-null
/// correspondence: Y_t -> 0 weakly iff Z_t -> infinity).
WeakNullSeries weak_null_diagnostic(const SolutionRecord& record,
                                    const std::vector<SpectralElement>& test_elements);

struct BlowupMonitor {
    bool applicable = false;  // record flagged exploded
    bool triggered = false;   // tail nondecreasing and above every earlier value
};

/// Norm blow-up monitor over the record's ||Y_t - y||_q series: on exploded
/// paths the last ten recorded values must be nondecreasing and exceed every
/// earlier recorded value.
BlowupMonitor norm_blowup_monitor(const SolutionRecord& record);

/// Writes manifest.json, the Z path CSV and per-snapshot coefficient sidecar
/// CSVs (one row per k: columns k_1..k_d, c) into the directory.
void write_record(const SolutionRecord& record, const std::string& directory);

}  // namespace hermspde

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hermspde/coefficient_field.hpp"
#include "hermspde/noise.hpp"
#include "hermspde/spectral_element.hpp"

namespace hermspde {

enum class PathStatus { completed, exited, exploded };

std::string to_string(PathStatus s);

/// One trajectory on the uniform grid t_m = m dt. States are finite up to
/// and including the last recorded index; a path that hits the explosion
/// guard carries the one-point-compactification state as a status flag
/// rather than as non-finite numbers.
struct FinitePath {
    double dt = 0.0;
    Eigen::MatrixXd states;  // (last_index+1) x d, row m = X_{t_m}
    PathStatus status = PathStatus::completed;
    double eta_hat = std::numeric_limits<double>::infinity();  // estimated stopping time
    double exit_radius = 0.0;                                  // for status == exited

    int last_index() const { return static_cast<int>(states.rows()) - 1; }
    double time(int m) const { return m * dt; }
    Eigen::VectorXd state(int m) const { return states.row(m); }

    /// CSV with mandatory header: t, X_1..X_d, status.
    void write_csv(const std::string& path) const;
};

struct BallGuard {
    Eigen::VectorXd center;
    double radius = 0.0;
};

struct Guards {
    double R_explode = 1e6;
    std::optional<BallGuard> ball;
};

using StateCoefficients = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;  // d x n
using StateDrift = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;         // d

/// Explicit Euler-Maruyama for dX = sigma(X) dB + b(X) dt from x0 over [0, T].
/// Stops at the first guard violation, recording a linearly interpolated
/// crossing time in eta_hat; a non-finite coefficient evaluation is recorded
/// as an explosion at that step.
FinitePath euler_maruyama(const StateCoefficients& sigma, const StateDrift& b,
                          const Eigen::VectorXd& x0, double dt, double T,
                          const NoiseDriver& driver, std::uint64_t stream,
                          const Guards& guards = {});

/// Characteristic process of the translated state: the Euler loop above with
/// step-m coefficients evaluated at tau_{Z_m}(y) through the direct kernels
/// (see CoefficientEntry::at_translate). Z_0 = 0. A step offset consumes the
/// driver's increments starting at that index (restarted solves share the
/// remainder of a path's noise this way).
FinitePath characteristic_Z(const CoefficientField& field, const SpectralElement& y, double dt,
                            double T, const NoiseDriver& driver, std::uint64_t stream,
                            const Guards& guards = {}, std::uint64_t step_offset = 0);

/// First time a norm series exceeds r, linearly interpolated between grid
/// values; nullopt if the series never crosses.
std::optional<double> first_crossing(const std::vector<double>& norms, double dt, double r);

/// First grid time with ||Y_t - y||_q > r over a snapshot sequence.
std::optional<double> exit_time(const std::vector<SpectralElement>& snapshots,
                                const SpectralElement& y, double r, RegularityIndex q, double dt);

}  // namespace hermspde

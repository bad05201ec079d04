#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace hermspde {

/// Counter-based Gaussian increment source. The increment for
/// (seed, stream, step) is a pure function of those values, so ensembles are
/// reproducible regardless of evaluation order or concurrency; per-component
/// variance equals the step size. A coarsening factor sums consecutive fine
/// increments, which is how refinement studies share one driver.
class NoiseDriver {
public:
    NoiseDriver(std::uint64_t seed, int dimension, double dt, int coarsen = 1);

    std::uint64_t seed() const { return seed_; }
    int dimension() const { return n_; }
    double dt() const { return dt_fine_ * coarsen_; }
    double dt_fine() const { return dt_fine_; }
    int coarsen() const { return coarsen_; }

    /// N(0, dt) increment vector for one step of one stream.
    Eigen::VectorXd increment(std::uint64_t stream, std::uint64_t step) const;

    /// Same seed and fine step, increments summed in blocks of `factor`.
    NoiseDriver coarsened(int factor) const;

    /// Standard normal for (seed, stream, step, component).
    double standard_normal(std::uint64_t stream, std::uint64_t step, int component) const;

private:
    std::uint64_t seed_;
    int n_;
    double dt_fine_;
    int coarsen_;
};

}  // namespace hermspde

#include "hermspde/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace hermspde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double to_unit(std::uint64_t x) {
    // (0, 1), never exactly 0 so log() below is safe
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

NoiseDriver::NoiseDriver(std::uint64_t seed, int dimension, double dt, int coarsen)
    : seed_(seed), n_(dimension), dt_fine_(dt), coarsen_(coarsen) {
    if (dimension < 1) throw std::invalid_argument("NoiseDriver: dimension must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("NoiseDriver: dt must be positive");
    if (coarsen < 1) throw std::invalid_argument("NoiseDriver: coarsen factor must be >= 1");
}

double NoiseDriver::standard_normal(std::uint64_t stream, std::uint64_t step,
                                    int component) const {
    std::uint64_t h = splitmix64(seed_ ^ 0x5bf0f5e71c6c3e2bull);
    h = splitmix64(h ^ splitmix64(stream + 0x1d8e4e27c47d124full));
    h = splitmix64(h ^ splitmix64(step + 0x8f1bbcdcbfa53e0bull));
    h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(component) + 0x2545f4914f6cdd1dull));
    const double u1 = to_unit(h);
    const double u2 = to_unit(splitmix64(h + 0x6a09e667f3bcc909ull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd NoiseDriver::increment(std::uint64_t stream, std::uint64_t step) const {
    Eigen::VectorXd dB = Eigen::VectorXd::Zero(n_);
    const double scale = std::sqrt(dt_fine_);
    for (int c = 0; c < coarsen_; ++c) {
        const std::uint64_t fine = step * static_cast<std::uint64_t>(coarsen_) + c;
        for (int j = 0; j < n_; ++j) dB[j] += scale * standard_normal(stream, fine, j);
    }
    return dB;
}

NoiseDriver NoiseDriver::coarsened(int factor) const {
    return NoiseDriver(seed_, n_, dt_fine_, coarsen_ * factor);
}

}  // namespace hermspde

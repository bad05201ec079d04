#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hermspde {

/// Multi-index k = (k_1,...,k_d) of nonnegative integers.
using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& k) {
    int s = 0;
    for (int ki : k) s += ki;
    return s;
}

/// Finite-dimensional stand-in for the Hermite basis: the graded index set
/// Gamma_N = { k : |k| <= N } in dimension d, enumerated in graded
/// lexicographic order (total degree first, lexicographic within a degree
/// shell). The ordering is total and deterministic; |Gamma_N| = C(N+d, d).
class TruncationScheme {
public:
    TruncationScheme(int dimension, int degree_bound);

    int dimension() const { return d_; }
    int degree_bound() const { return N_; }
    int size() const { return static_cast<int>(indices_.size()); }

    const MultiIndex& index(int pos) const { return indices_[pos]; }
    const std::vector<MultiIndex>& indices() const { return indices_; }

    /// Position of k in the grlex enumeration; throws if |k| > N or any
    /// entry is negative or k has the wrong length.
    int position(const MultiIndex& k) const;
    bool contains(const MultiIndex& k) const;

    /// Total degree |k| of the multi-index at a given position.
    int degree_at(int pos) const { return degrees_[pos]; }

    bool same_shape(const TruncationScheme& other) const {
        return d_ == other.d_ && N_ == other.N_;
    }

private:
    static std::string key_of(const MultiIndex& k);

    int d_;
    int N_;
    std::vector<MultiIndex> indices_;
    std::vector<int> degrees_;
    std::unordered_map<std::string, int> positions_;
};

using SchemePtr = std::shared_ptr<const TruncationScheme>;

inline SchemePtr make_scheme(int dimension, int degree_bound) {
    return std::make_shared<const TruncationScheme>(dimension, degree_bound);
}

/// C(n, k) as a 64-bit integer; throws on overflow-sized inputs.
std::int64_t binomial(int n, int k);

}  // namespace hermspde

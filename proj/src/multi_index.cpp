#include "hermspde/multi_index.hpp"

#include <algorithm>

namespace hermspde {

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        if (r > (INT64_MAX / (n - k + i))) throw std::overflow_error("binomial overflow");
        r = r * (n - k + i) / i;
    }
    return r;
}

namespace {

// All k in dimension d with |k| == deg, lexicographically ascending.
void emit_shell(int d, int deg, MultiIndex& prefix, std::vector<MultiIndex>& out) {
    if (static_cast<int>(prefix.size()) == d - 1) {
        prefix.push_back(deg);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int v = 0; v <= deg; ++v) {
        prefix.push_back(v);
        emit_shell(d, deg - v, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

TruncationScheme::TruncationScheme(int dimension, int degree_bound)
    : d_(dimension), N_(degree_bound) {
    if (d_ < 1) throw std::invalid_argument("TruncationScheme: dimension must be >= 1");
    if (N_ < 0) throw std::invalid_argument("TruncationScheme: degree bound must be >= 0");
    indices_.reserve(static_cast<std::size_t>(binomial(N_ + d_, d_)));
    MultiIndex prefix;
    for (int deg = 0; deg <= N_; ++deg) emit_shell(d_, deg, prefix, indices_);
    degrees_.resize(indices_.size());
    positions_.reserve(indices_.size());
    for (int i = 0; i < static_cast<int>(indices_.size()); ++i) {
        degrees_[i] = degree(indices_[i]);
        positions_.emplace(key_of(indices_[i]), i);
    }
}

std::string TruncationScheme::key_of(const MultiIndex& k) {
    std::string s;
    s.reserve(k.size() * 3);
    for (int ki : k) {
        s += std::to_string(ki);
        s += ',';
    }
    return s;
}

int TruncationScheme::position(const MultiIndex& k) const {
    if (static_cast<int>(k.size()) != d_)
        throw std::invalid_argument("multi-index has wrong dimension");
    auto it = positions_.find(key_of(k));
    if (it == positions_.end())
        throw std::out_of_range("multi-index outside the truncation set");
    return it->second;
}

bool TruncationScheme::contains(const MultiIndex& k) const {
    if (static_cast<int>(k.size()) != d_) return false;
    int s = 0;
    for (int ki : k) {
        if (ki < 0) return false;
        s += ki;
    }
    return s <= N_;
}

}  // namespace hermspde

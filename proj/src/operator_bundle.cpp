#include "hermspde/operator_bundle.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hermspde {

Eigen::SparseMatrix<double> derivative_matrix(int axis, const TruncationScheme& scheme) {
    const int d = scheme.dimension();
    const int N = scheme.degree_bound();
    if (axis < 0 || axis >= d) throw std::invalid_argument("derivative_matrix: axis out of range");

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * scheme.size());
    for (int col = 0; col < scheme.size(); ++col) {
        MultiIndex k = scheme.index(col);
        const int m = k[axis];
        if (m > 0) {
            k[axis] = m - 1;
            trips.emplace_back(scheme.position(k), col, std::sqrt(0.5 * m));
            k[axis] = m;
        }
        if (scheme.degree_at(col) < N) {
            k[axis] = m + 1;
            trips.emplace_back(scheme.position(k), col, -std::sqrt(0.5 * (m + 1)));
            k[axis] = m;
        }
        // |k| = N: the h_{k+e_axis} output leaves Gamma_N and is dropped.
    }
    Eigen::SparseMatrix<double> D(scheme.size(), scheme.size());
    D.setFromTriplets(trips.begin(), trips.end());
    return D;
}

OperatorBundle::OperatorBundle(SchemePtr scheme) : scheme_(std::move(scheme)) {
    const int d = scheme_->dimension();
    first_.reserve(d);
    for (int i = 0; i < d; ++i) first_.push_back(derivative_matrix(i, *scheme_));
    second_.reserve(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) second_.push_back(first_[i] * first_[j]);
}

void OperatorBundle::check_axis(int axis) const {
    if (axis < 0 || axis >= scheme_->dimension())
        throw std::invalid_argument("OperatorBundle: axis out of range");
}

const Eigen::SparseMatrix<double>& OperatorBundle::derivative(int axis) const {
    check_axis(axis);
    return first_[axis];
}

const Eigen::SparseMatrix<double>& OperatorBundle::second_derivative(int i, int j) const {
    check_axis(i);
    check_axis(j);
    return second_[static_cast<std::size_t>(i) * scheme_->dimension() + j];
}

SpectralElement OperatorBundle::apply_derivative(int axis, const SpectralElement& u) const {
    check_axis(axis);
    return SpectralElement(u.scheme(), first_[axis] * u.coeffs());
}

SpectralElement OperatorBundle::apply_second_derivative(int i, int j,
                                                        const SpectralElement& u) const {
    return SpectralElement(u.scheme(), second_derivative(i, j) * u.coeffs());
}

double OperatorBundle::dropped_mass(int axis, const SpectralElement& u) const {
    check_axis(axis);
    const auto& scheme = *scheme_;
    const int N = scheme.degree_bound();
    double s = 0.0;
    for (int col = 0; col < scheme.size(); ++col) {
        if (scheme.degree_at(col) != N) continue;
        const double amp = std::sqrt(0.5 * (scheme.index(col)[axis] + 1)) * u.coeffs()[col];
        s += amp * amp;
    }
    return s;
}

Eigen::MatrixXd OperatorBundle::similarity(const Eigen::SparseMatrix<double>& A, double q) const {
    // W^{1/2} A W^{-1/2} with W = diag((2|k|+d)^{2q}); its singular values
    // are the singular values of A with respect to <.,.>_q.
    const auto& scheme = *scheme_;
    const int n = scheme.size();
    const int d = scheme.dimension();
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = std::pow(2.0 * scheme.degree_at(i) + d, q);
    Eigen::MatrixXd M = Eigen::MatrixXd(A);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) *= w[i] / w[j];
    return M;
}

std::vector<int> OperatorBundle::interior_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < scheme_->size(); ++i)
        if (scheme_->degree_at(i) <= scheme_->degree_bound() - 2) idx.push_back(i);
    return idx;
}

namespace {

double largest_singular_value(const Eigen::MatrixXd& M, const std::vector<int>& idx) {
    if (idx.empty()) return 0.0;
    Eigen::MatrixXd sub(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = M(idx[a], idx[b]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    return svd.singularValues()[0];
}

}  // namespace

double OperatorBundle::adjoint_defect_norm(int axis, RegularityIndex q) const {
    check_axis(axis);
    const Eigen::MatrixXd S = similarity(first_[axis], q.p);
    const Eigen::MatrixXd M = S + S.transpose();
    return largest_singular_value(M, interior_indices());
}

double OperatorBundle::derivative_norm(int axis, RegularityIndex q) const {
    check_axis(axis);
    return largest_singular_value(similarity(first_[axis], q.p), interior_indices());
}

std::shared_ptr<const OperatorBundle> shared_bundle(const SchemePtr& scheme) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, std::shared_ptr<const OperatorBundle>> cache;
    const std::pair<int, int> key{scheme->dimension(), scheme->degree_bound()};
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[key];
    if (!slot) slot = std::make_shared<const OperatorBundle>(scheme);
    return slot;
}

}  // namespace hermspde

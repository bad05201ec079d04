#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "hermspde/multi_index.hpp"
#include "hermspde/spectral_element.hpp"

namespace hermspde {

/// Truncated derivative matrices D_i and D_ij = D_i D_j on Gamma_N, plus
/// weighted operator norms. D_i acts as an endomorphism of Gamma_N by
/// dropping the |k| = N+1 output modes; the dropped mass is queryable so
/// truncation error stays observable. Matrices are built once at
/// construction and immutable afterwards.
class OperatorBundle {
public:
    explicit OperatorBundle(SchemePtr scheme);

    const SchemePtr& scheme() const { return scheme_; }
    int dimension() const { return scheme_->dimension(); }

    /// One-dimensional action per axis: d h_m = sqrt(m/2) h_{m-1}
    /// - sqrt((m+1)/2) h_{m+1}, tensorized; axis in [0, d).
    const Eigen::SparseMatrix<double>& derivative(int axis) const;
    const Eigen::SparseMatrix<double>& second_derivative(int i, int j) const;

    SpectralElement apply_derivative(int axis, const SpectralElement& u) const;
    SpectralElement apply_second_derivative(int i, int j, const SpectralElement& u) const;

    /// Squared mass of the |k| = N+1 output modes dropped when applying D_axis to u.
    double dropped_mass(int axis, const SpectralElement& u) const;

    /// Largest singular value of T_j = D*_j + D_j (adjoint taken in the
    /// <.,.>_q inner product), restricted to the interior block |k| <= N-2
    /// to exclude truncation-edge artifacts. Zero at q = 0, where the
    /// truncated D is exactly skew-symmetric.
    double adjoint_defect_norm(int axis, RegularityIndex q) const;

    /// ||D_j||_q on the interior block, for comparison against the defect.
    double derivative_norm(int axis, RegularityIndex q) const;

private:
    void check_axis(int axis) const;
    Eigen::MatrixXd similarity(const Eigen::SparseMatrix<double>& A, double q) const;
    std::vector<int> interior_indices() const;

    SchemePtr scheme_;
    std::vector<Eigen::SparseMatrix<double>> first_;   // D_i, one per axis
    std::vector<Eigen::SparseMatrix<double>> second_;  // D_ij, row-major in (i,j)
};

/// Matrix of the truncated partial derivative along `axis` (module operation;
/// the bundle caches these per scheme).
Eigen::SparseMatrix<double> derivative_matrix(int axis, const TruncationScheme& scheme);

/// Shared immutable bundle per (d, N); population is idempotent and race-free.
std::shared_ptr<const OperatorBundle> shared_bundle(const SchemePtr& scheme);

}  // namespace hermspde

#pragma once

// Multidomain signals on a Cartesian product graph and their smoothness.

#include <span>

#include "pgl/graph.hpp"

namespace pgl {

/// T snapshots on an N = P*Q node product graph. Column i of data() is
/// x_i = vec(X_i) with X_i a P x Q matrix stacked column by column.
class MultidomainData {
public:
    MultidomainData() = default;
    MultidomainData(Index P, Index Q, Matrix data);

    Index P() const noexcept { return P_; }
    Index Q() const noexcept { return Q_; }
    Index N() const noexcept { return P_ * Q_; }
    Index T() const noexcept { return data_.cols(); }

    const Matrix& data() const noexcept { return data_; }
    Matrix& data() noexcept { return data_; }

    /// X_i as a P x Q view into column i.
    Eigen::Map<const Matrix> snapshot(Index i) const {
        return Eigen::Map<const Matrix>(data_.col(i).data(), P_, Q_);
    }
    Eigen::Map<Matrix> snapshot(Index i) {
        return Eigen::Map<Matrix>(data_.col(i).data(), P_, Q_);
    }

private:
    Index P_ = 0;
    Index Q_ = 0;
    Matrix data_;
};

/// Observed, possibly incomplete, data with a 0/1 observation mask.
struct MaskedData {
    Index P = 0;
    Index Q = 0;
    Matrix Y;     // N x T; entries where mask == 0 carry no information
    Matrix mask;  // N x T, 1 = observed

    Index N() const noexcept { return P * Q; }
    Index T() const noexcept { return Y.cols(); }
    Index observed_count() const;
};

void check_masked(const MaskedData& masked);

/// X[p][q] = x[p + q*P].
Matrix reshape_signal(const Vector& x, Index P, Index Q);
Vector vec(const Matrix& X);

/// Order-fixed pairwise (tree) sum, so results do not depend on how the
/// terms were produced.
double pairwise_sum(std::span<const double> terms);

/// sum_i x_i^T L_N x_i.
double smoothness_full(const MultidomainData& data, const Laplacian& Ln);

/// sum_i tr(X_i^T L_P X_i) + tr(X_i L_Q X_i^T).
double smoothness_factored(const MultidomainData& data, const Laplacian& Lp, const Laplacian& Lq);

/// sum_i X_i X_i^T (P x P).
Matrix row_gram(const MultidomainData& data);
/// sum_i X_i^T X_i (Q x Q).
Matrix column_gram(const MultidomainData& data);

/// Mean over snapshots of ||x_i||^2.
double mean_snapshot_energy(const Matrix& data);

}  // namespace pgl

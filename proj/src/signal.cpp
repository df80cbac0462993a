#include "pgl/signal.hpp"

#include <string>
#include <vector>

#include "pgl/error.hpp"

namespace pgl {

MultidomainData::MultidomainData(Index P, Index Q, Matrix data)
    : P_(P), Q_(Q), data_(std::move(data)) {
    if (P < 1 || Q < 1) throw DimensionError("factor sizes must be positive");
    if (data_.rows() != P * Q) {
        throw DimensionError("data has " + std::to_string(data_.rows()) + " rows, expected P*Q = " +
                             std::to_string(P * Q));
    }
}

Index MaskedData::observed_count() const {
    Index count = 0;
    for (Index i = 0; i < mask.size(); ++i) count += mask.data()[i] != 0.0 ? 1 : 0;
    return count;
}

void check_masked(const MaskedData& masked) {
    if (masked.P < 1 || masked.Q < 1) throw DimensionError("factor sizes must be positive");
    if (masked.Y.rows() != masked.N()) throw DimensionError("observed data must have P*Q rows");
    if (masked.mask.rows() != masked.Y.rows() || masked.mask.cols() != masked.Y.cols()) {
        throw DimensionError("mask shape does not match observed data");
    }
    for (Index i = 0; i < masked.mask.size(); ++i) {
        const double m = masked.mask.data()[i];
        if (m != 0.0 && m != 1.0) throw DataError("mask entries must be 0 or 1");
    }
}

Matrix reshape_signal(const Vector& x, Index P, Index Q) {
    if (x.size() != P * Q) {
        throw DimensionError("signal length " + std::to_string(x.size()) + " != P*Q = " +
                             std::to_string(P * Q));
    }
    return Eigen::Map<const Matrix>(x.data(), P, Q);
}

Vector vec(const Matrix& X) { return Eigen::Map<const Vector>(X.data(), X.size()); }

double pairwise_sum(std::span<const double> terms) {
    if (terms.empty()) return 0.0;
    if (terms.size() <= 8) {
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

double smoothness_full(const MultidomainData& data, const Laplacian& Ln) {
    if (Ln.n() != data.N()) throw DimensionError("Laplacian size does not match N");
    std::vector<double> terms(static_cast<std::size_t>(data.T()));
    for (Index i = 0; i < data.T(); ++i) {
        const auto x = data.data().col(i);
        terms[i] = x.dot(Ln.matrix() * x);
    }
    return pairwise_sum(terms);
}

double smoothness_factored(const MultidomainData& data, const Laplacian& Lp, const Laplacian& Lq) {
    if (Lp.n() != data.P() || Lq.n() != data.Q()) {
        throw DimensionError("factor Laplacian sizes do not match P and Q");
    }
    std::vector<double> terms(static_cast<std::size_t>(data.T()));
    for (Index i = 0; i < data.T(); ++i) {
        const auto X = data.snapshot(i);
        // tr(X^T Lp X) + tr(X Lq X^T) = <X, Lp X> + <X, X Lq>
        terms[i] = (X.array() * (Lp.matrix() * X).array()).sum() +
                   (X.array() * (X * Lq.matrix()).array()).sum();
    }
    return pairwise_sum(terms);
}

Matrix row_gram(const MultidomainData& data) {
    Matrix S = Matrix::Zero(data.P(), data.P());
    for (Index i = 0; i < data.T(); ++i) {
        const auto X = data.snapshot(i);
        S.noalias() += X * X.transpose();
    }
    return S;
}

Matrix column_gram(const MultidomainData& data) {
    Matrix S = Matrix::Zero(data.Q(), data.Q());
    for (Index i = 0; i < data.T(); ++i) {
        const auto X = data.snapshot(i);
        S.noalias() += X.transpose() * X;
    }
    return S;
}

double mean_snapshot_energy(const Matrix& data) {
    if (data.cols() == 0) return 0.0;
    return data.squaredNorm() / static_cast<double>(data.cols());
}

}  // namespace pgl

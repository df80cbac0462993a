#pragma once

// Standard-form QPs over signed-vecl Laplacian parameters:
//
//     minimize 1/2 z^T diag(h) z + q^T z   subject to  C z = b,  z >= 0.
//
// Each factor Laplacian L (n x n) occupies one block of z holding, column by
// column, L_jj followed by -L_ij for i > j. Off-diagonals are stored negated
// so that the sign constraint of a valid Laplacian is simply z >= 0.

#include <string>
#include <utility>
#include <vector>

#include "pgl/graph.hpp"
#include "pgl/signal.hpp"

namespace pgl {

struct SignedVecl {
    Index n = 0;
    Vector v;

    static Index expected_length(Index n) { return n * (n + 1) / 2; }
};

/// Offset of column j (its diagonal slot) within a signed-vecl block.
inline Index vecl_column_start(Index n, Index j) { return j * n - j * (j - 1) / 2; }

/// Slot of the (i, j) entry, either order, within a signed-vecl block.
inline Index vecl_index(Index n, Index i, Index j) {
    if (i < j) std::swap(i, j);
    return vecl_column_start(n, j) + (i - j);
}

SignedVecl signed_vecl(const Laplacian& L);
Laplacian unvecl(const SignedVecl& v);

/// A contiguous segment of z that encodes one n x n Laplacian.
struct QpBlock {
    std::string name;
    Index offset = 0;
    Index n = 0;

    Index length() const { return SignedVecl::expected_length(n); }
};

struct StandardQP {
    Vector hess_diag;  // K, >= 0
    Vector q;          // K
    Matrix C;          // M x K
    Vector b;          // M
    std::vector<QpBlock> blocks;

    Index K() const noexcept { return q.size(); }
    Index M() const noexcept { return b.size(); }

    /// Throws DimensionError/std::invalid_argument on inconsistent data.
    void validate() const;

    double objective(const Vector& z) const;
    double primal_residual(const Vector& z) const;  // ||Cz - b||_inf

    /// Laplacian stored in block `index` of z.
    Laplacian block_laplacian(const Vector& z, std::size_t index) const;
};

/// build_factor_qp objective: alpha * sum_i [tr(X_i^T Lp X_i) + tr(X_i Lq X_i^T)]
/// + beta1 ||Lp||_F^2 + beta2 ||Lq||_F^2 over Lp in L_P, Lq in L_Q.
StandardQP build_factor_qp(const MultidomainData& data, double alpha, double beta1, double beta2);

/// Same construction for the full N x N Laplacian of an N x T data matrix.
StandardQP build_single_qp(const Matrix& data, double alpha, double beta);

/// min ||Ln - Lp (+) Lq||_F^2 over valid factors, reduced to a separable
/// diagonal QP by the constant value of tr(Lp) tr(Lq) on the feasible set.
StandardQP build_factorization_qp(const Laplacian& Ln, Index P, Index Q);

/// ||Ln||_F^2 + 2PQ: add to the factorization QP objective to recover
/// ||Ln - Lp (+) Lq||_F^2.
double factorization_constant(const Laplacian& Ln, Index P, Index Q);

/// Sum over the blocks of P x P diagonal blocks of Ln (partial trace over Q).
Matrix partial_trace_q(const Laplacian& Ln, Index P, Index Q);
/// Q x Q matrix of traces of the P x P blocks of Ln (partial trace over P).
Matrix partial_trace_p(const Laplacian& Ln, Index P, Index Q);

}  // namespace pgl

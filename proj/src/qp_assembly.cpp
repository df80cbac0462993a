#include "pgl/qp.hpp"

#include <cmath>
#include <stdexcept>

#include "pgl/error.hpp"

namespace pgl {

SignedVecl signed_vecl(const Laplacian& L) {
    const Index n = L.n();
    SignedVecl out{n, Vector(SignedVecl::expected_length(n))};
    Index k = 0;
    for (Index j = 0; j < n; ++j) {
        out.v[k++] = L(j, j);
        for (Index i = j + 1; i < n; ++i) out.v[k++] = -L(i, j);
    }
    return out;
}

Laplacian unvecl(const SignedVecl& v) {
    const Index n = v.n;
    if (v.v.size() != SignedVecl::expected_length(n)) {
        throw DimensionError("signed vecl has length " + std::to_string(v.v.size()) +
                             ", expected n(n+1)/2 = " +
                             std::to_string(SignedVecl::expected_length(n)));
    }
    Matrix L(n, n);
    Index k = 0;
    for (Index j = 0; j < n; ++j) {
        L(j, j) = v.v[k++];
        for (Index i = j + 1; i < n; ++i) {
            L(i, j) = -v.v[k];
            L(j, i) = -v.v[k];
            ++k;
        }
    }
    return Laplacian(std::move(L));
}

void StandardQP::validate() const {
    const Index k = K();
    if (hess_diag.size() != k || C.cols() != k || C.rows() != M()) {
        throw DimensionError("standard QP: inconsistent dimensions");
    }
    if ((hess_diag.array() < 0.0).any()) {
        throw std::invalid_argument("standard QP: Hessian diagonal must be nonnegative");
    }
    for (Index r = 0; r < C.rows(); ++r) {
        if ((C.row(r).array() == 0.0).all()) {
            throw std::invalid_argument("standard QP: constraint row " + std::to_string(r) +
                                        " is all zero");
        }
    }
}

double StandardQP::objective(const Vector& z) const {
    return 0.5 * (hess_diag.array() * z.array().square()).sum() + q.dot(z);
}

double StandardQP::primal_residual(const Vector& z) const {
    if (M() == 0) return 0.0;
    return (C * z - b).cwiseAbs().maxCoeff();
}

Laplacian StandardQP::block_laplacian(const Vector& z, std::size_t index) const {
    const QpBlock& blk = blocks.at(index);
    return unvecl(SignedVecl{blk.n, z.segment(blk.offset, blk.length())});
}

namespace {

// Writes curvature and linear coefficients for one block so that
//   1/2 sum h z^2 + q^T z = <G, L> + beta ||L||_F^2
// with L = unvecl(z). <G, L> = sum_j G_jj L_jj - 2 sum_{i>j} G_ij z_ij.
void fill_block(StandardQP& qp, const QpBlock& blk, const Matrix& G, double ridge) {
    for (Index j = 0; j < blk.n; ++j) {
        const Index base = blk.offset + vecl_column_start(blk.n, j);
        qp.hess_diag[base] = 2.0 * ridge;
        qp.q[base] = G(j, j);
        for (Index i = j + 1; i < blk.n; ++i) {
            qp.hess_diag[base + (i - j)] = 4.0 * ridge;
            qp.q[base + (i - j)] = -(G(i, j) + G(j, i));
        }
    }
}

// Row sums L 1 = 0 for each node, then tr(L) = n.
void fill_constraints(StandardQP& qp, const QpBlock& blk, Index row0) {
    const Index n = blk.n;
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
            qp.C(row0 + r, blk.offset + vecl_index(n, r, c)) = (r == c) ? 1.0 : -1.0;
        }
        qp.b[row0 + r] = 0.0;
    }
    for (Index j = 0; j < n; ++j) qp.C(row0 + n, blk.offset + vecl_column_start(n, j)) = 1.0;
    qp.b[row0 + n] = static_cast<double>(n);
}

StandardQP allocate(const std::vector<QpBlock>& blocks) {
    Index K = 0;
    Index M = 0;
    for (const auto& blk : blocks) {
        K += blk.length();
        M += blk.n + 1;
    }
    StandardQP qp;
    qp.hess_diag = Vector::Zero(K);
    qp.q = Vector::Zero(K);
    qp.C = Matrix::Zero(M, K);
    qp.b = Vector::Zero(M);
    qp.blocks = blocks;
    Index row = 0;
    for (const auto& blk : blocks) {
        fill_constraints(qp, blk, row);
        row += blk.n + 1;
    }
    return qp;
}

void check_weights(double alpha, double beta1, double beta2) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(beta1 >= 0.0) || !(beta2 >= 0.0)) throw std::invalid_argument("betas must be >= 0");
}

}  // namespace

StandardQP build_factor_qp(const MultidomainData& data, double alpha, double beta1, double beta2) {
    check_weights(alpha, beta1, beta2);
    const Index P = data.P();
    const Index Q = data.Q();
    if (data.data().rows() != P * Q) throw DimensionError("data rows must equal P*Q");
    const QpBlock bp{"P", 0, P};
    const QpBlock bq{"Q", bp.length(), Q};
    StandardQP qp = allocate({bp, bq});
    fill_block(qp, bp, alpha * row_gram(data), beta1);
    fill_block(qp, bq, alpha * column_gram(data), beta2);
    return qp;
}

StandardQP build_single_qp(const Matrix& data, double alpha, double beta) {
    check_weights(alpha, beta, beta);
    const Index N = data.rows();
    if (N < 1) throw DimensionError("data must have at least one row");
    const QpBlock blk{"N", 0, N};
    StandardQP qp = allocate({blk});
    const Matrix S = data * data.transpose();
    fill_block(qp, blk, alpha * S, beta);
    return qp;
}

Matrix partial_trace_q(const Laplacian& Ln, Index P, Index Q) {
    if (Ln.n() != P * Q) throw DimensionError("Laplacian size must equal P*Q");
    Matrix A = Matrix::Zero(P, P);
    for (Index q = 0; q < Q; ++q) A += Ln.matrix().block(q * P, q * P, P, P);
    return A;
}

Matrix partial_trace_p(const Laplacian& Ln, Index P, Index Q) {
    if (Ln.n() != P * Q) throw DimensionError("Laplacian size must equal P*Q");
    Matrix B(Q, Q);
    for (Index q = 0; q < Q; ++q) {
        for (Index r = 0; r < Q; ++r) B(q, r) = Ln.matrix().block(q * P, r * P, P, P).trace();
    }
    return B;
}

StandardQP build_factorization_qp(const Laplacian& Ln, Index P, Index Q) {
    if (P < 1 || Q < 1 || Ln.n() != P * Q) throw DimensionError("Laplacian size must equal P*Q");
    // ||Ln - I(x)Lp - Lq(x)I||^2 = const - 2<A, Lp> - 2<B, Lq> + Q||Lp||^2 + P||Lq||^2
    //                              + 2 tr(Lp) tr(Lq), and tr(Lp) tr(Lq) = PQ when feasible.
    const QpBlock bp{"P", 0, P};
    const QpBlock bq{"Q", bp.length(), Q};
    StandardQP qp = allocate({bp, bq});
    fill_block(qp, bp, -2.0 * partial_trace_q(Ln, P, Q), static_cast<double>(Q));
    fill_block(qp, bq, -2.0 * partial_trace_p(Ln, P, Q), static_cast<double>(P));
    return qp;
}

double factorization_constant(const Laplacian& Ln, Index P, Index Q) {
    return Ln.matrix().squaredNorm() + 2.0 * static_cast<double>(P * Q);
}

}  // namespace pgl

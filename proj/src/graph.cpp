#include "pgl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pgl/error.hpp"

namespace pgl {

const char* to_string(SolverFailure kind) {
    switch (kind) {
        case SolverFailure::ZeroCurvature: return "zero curvature";
        case SolverFailure::NotConverged: return "not converged";
        case SolverFailure::UnboundedLevel: return "unbounded water level";
        case SolverFailure::NonFinite: return "non-finite value";
        case SolverFailure::Infeasible: return "infeasible";
    }
    return "solver failure";
}

Laplacian::Laplacian(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw DimensionError("Laplacian must be square, got " + std::to_string(entries_.rows()) +
                             "x" + std::to_string(entries_.cols()));
    }
}

Laplacian Laplacian::zero(Index n) { return Laplacian(Matrix::Zero(n, n)); }

Laplacian Laplacian::trace_normalized() const {
    const double tr = trace();
    if (n() == 0 || tr == 0.0) return *this;
    return Laplacian(entries_ * (static_cast<double>(n()) / tr));
}

bool EdgeSet::contains(Index i, Index j) const {
    if (i > j) std::swap(i, j);
    return edges.count({i, j}) > 0;
}

Laplacian laplacian_from_weights(const EdgeWeights& weights) {
    const Index n = weights.n;
    if (n < 0 || weights.w.size() != EdgeWeights::expected_length(n)) {
        throw DimensionError("edge weight vector has length " + std::to_string(weights.w.size()) +
                             ", expected n(n-1)/2 = " +
                             std::to_string(EdgeWeights::expected_length(n)));
    }
    Matrix L = Matrix::Zero(n, n);
    Index k = 0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i < n; ++i, ++k) {
            const double w = weights.w[k];
            L(i, j) = -w;
            L(j, i) = -w;
        }
    }
    // Degrees summed from the stored off-diagonals so each row sums to exactly
    // zero up to a single rounding per addition.
    for (Index i = 0; i < n; ++i) {
        double d = 0.0;
        for (Index j = 0; j < n; ++j) {
            if (j != i) d -= L(i, j);
        }
        L(i, i) = d;
    }
    return Laplacian(std::move(L));
}

EdgeWeights weights_from_laplacian(const Laplacian& L) {
    const Index n = L.n();
    EdgeWeights out{n, Vector(EdgeWeights::expected_length(n))};
    Index k = 0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i < n; ++i) out.w[k++] = -L(i, j);
    }
    return out;
}

Laplacian cartesian_sum(const Laplacian& Lp, const Laplacian& Lq) {
    const Index P = Lp.n();
    const Index Q = Lq.n();
    Matrix L = Matrix::Zero(P * Q, P * Q);
    for (Index q = 0; q < Q; ++q) {
        L.block(q * P, q * P, P, P) = Lp.matrix();
    }
    for (Index q = 0; q < Q; ++q) {
        for (Index r = 0; r < Q; ++r) {
            const double v = Lq(q, r);
            if (v == 0.0) continue;
            for (Index p = 0; p < P; ++p) L(q * P + p, r * P + p) += v;
        }
    }
    return Laplacian(std::move(L));
}

LaplacianDiagnostics validate_laplacian(const Laplacian& L, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("validate_laplacian: tol must be positive");
    const Matrix& M = L.matrix();
    const Index n = L.n();
    LaplacianDiagnostics d;
    for (Index i = 0; i < n; ++i) {
        d.max_row_sum = std::max(d.max_row_sum, std::abs(M.row(i).sum()));
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            d.max_positive_offdiag = std::max(d.max_positive_offdiag, M(i, j));
            d.asymmetry = std::max(d.asymmetry, std::abs(M(i, j) - M(j, i)));
        }
    }
    d.trace_residual = std::abs(M.trace() - static_cast<double>(n));
    d.pass = d.max_row_sum <= tol && d.max_positive_offdiag <= tol && d.asymmetry <= tol;
    d.trace_ok = d.trace_residual <= tol;
    return d;
}

EdgeSet edge_set(const Laplacian& L, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("edge_set: threshold must be >= 0");
    EdgeSet out;
    out.n = L.n();
    for (Index i = 0; i < L.n(); ++i) {
        for (Index j = i + 1; j < L.n(); ++j) {
            if (-L(i, j) > threshold) out.edges.emplace(i, j);
        }
    }
    return out;
}

bool is_connected(const Laplacian& L) {
    const Index n = L.n();
    if (n <= 1) return true;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    Index reached = 1;
    while (!stack.empty()) {
        const Index u = stack.back();
        stack.pop_back();
        for (Index v = 0; v < n; ++v) {
            if (!seen[v] && v != u && -L(u, v) > 0.0) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == n;
}

}  // namespace pgl

#pragma once

// Dense graph Laplacians, edge-weight parametrization and the Cartesian
// (Kronecker-sum) graph product.

#include <cstddef>
#include <set>
#include <utility>

#include <Eigen/Dense>

namespace pgl {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultValidityTol = 1e-8;
inline constexpr double kDefaultEdgeThreshold = 1e-4;

/// Square matrix intended to hold a combinatorial graph Laplacian.
///
/// Construction only enforces squareness; whether the entries actually form a
/// valid Laplacian is reported by validate_laplacian(), so ground-truth or
/// hand-written matrices with arbitrary trace can be carried around.
class Laplacian {
public:
    Laplacian() = default;
    explicit Laplacian(Matrix entries);

    static Laplacian zero(Index n);

    Index n() const noexcept { return entries_.rows(); }
    const Matrix& matrix() const noexcept { return entries_; }
    double operator()(Index i, Index j) const { return entries_(i, j); }
    double trace() const { return entries_.trace(); }

    /// Copy rescaled so that trace() == n(). Zero-trace matrices are returned unchanged.
    Laplacian trace_normalized() const;

private:
    Matrix entries_;
};

/// Strict-lower-triangle edge weights, column-major: (1,0),(2,0),...,(n-1,n-2).
struct EdgeWeights {
    Index n = 0;
    Vector w;

    static Index expected_length(Index n) { return n * (n - 1) / 2; }
};

/// Position of the pair (i, j), i > j, in the column-major strict-lower order.
inline Index strict_lower_index(Index n, Index i, Index j) {
    return j * n - j * (j + 1) / 2 + (i - j - 1);
}

/// Undirected edge support; pairs are 0-based with first < second.
struct EdgeSet {
    Index n = 0;
    std::set<std::pair<Index, Index>> edges;

    std::size_t size() const noexcept { return edges.size(); }
    bool contains(Index i, Index j) const;
};

struct LaplacianDiagnostics {
    double max_row_sum = 0.0;           // max_i |sum_j L_ij|
    double max_positive_offdiag = 0.0;  // max(0, max_{i != j} L_ij)
    double trace_residual = 0.0;        // |tr(L) - n|
    double asymmetry = 0.0;             // max_ij |L_ij - L_ji|
    /// Structural validity: row sums, sign pattern and symmetry within tol.
    bool pass = false;
    /// Trace equals n within tol. Reported separately since free-form
    /// Laplacians (ground truth, raw weights) need not be trace-normalized.
    bool trace_ok = false;

    bool pass_with_trace() const noexcept { return pass && trace_ok; }
};

Laplacian laplacian_from_weights(const EdgeWeights& weights);

/// Inverse of laplacian_from_weights: w_k = -L_ij over the strict lower triangle.
EdgeWeights weights_from_laplacian(const Laplacian& L);

/// L_P (+) L_Q = I_Q (x) L_P + L_Q (x) I_P. Node (p, q) maps to index p + q * P.
Laplacian cartesian_sum(const Laplacian& Lp, const Laplacian& Lq);

LaplacianDiagnostics validate_laplacian(const Laplacian& L, double tol = kDefaultValidityTol);

/// Pairs (i, j), i < j, with -L_ij > threshold.
EdgeSet edge_set(const Laplacian& L, double threshold = kDefaultEdgeThreshold);

/// True when the graph with edges {-L_ij > 0} is connected (n <= 1 counts as connected).
bool is_connected(const Laplacian& L);

}  // namespace pgl

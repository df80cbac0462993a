#include "pgl/evaluation.hpp"

#include <vector>

#include <Eigen/SVD>

#include "pgl/error.hpp"

namespace pgl {

EdgeScore score_edge_sets(const EdgeSet& truth, const EdgeSet& estimate) {
    if (truth.n != estimate.n) throw DimensionError("edge sets have different node counts");
    EdgeScore s;
    s.true_edges = truth.size();
    s.est_edges = estimate.size();
    for (const auto& e : estimate.edges) s.matched += truth.edges.count(e);
    if (s.true_edges == 0 && s.est_edges == 0) {
        s.precision = s.recall = s.f_measure = 1.0;
        return s;
    }
    s.precision = s.est_edges ? static_cast<double>(s.matched) / s.est_edges : 0.0;
    s.recall = s.true_edges ? static_cast<double>(s.matched) / s.true_edges : 0.0;
    const double pr = s.precision + s.recall;
    s.f_measure = pr > 0.0 ? 2.0 * s.precision * s.recall / pr : 0.0;
    return s;
}

EdgeScore f_measure(const Laplacian& truth, const Laplacian& estimate, double threshold) {
    if (truth.n() != estimate.n()) throw DimensionError("f_measure: Laplacian sizes differ");
    return score_edge_sets(edge_set(truth.trace_normalized(), threshold),
                           edge_set(estimate.trace_normalized(), threshold));
}

double nuclear_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(M).singularValues().sum();
}

ObjectiveBreakdown objective_value(const MultidomainData& X, const Laplacian& Lp,
                                   const Laplacian& Lq, const ObjectiveWeights& weights,
                                   const MaskedData* observed) {
    if (Lp.n() != X.P() || Lq.n() != X.Q()) throw DimensionError("factor sizes do not match data");
    ObjectiveBreakdown out;
    if (observed) {
        if (observed->Y.rows() != X.N() || observed->Y.cols() != X.T() ||
            observed->mask.rows() != X.N() || observed->mask.cols() != X.T()) {
            throw DimensionError("observed data shape does not match X");
        }
        out.data_fit = (observed->mask.array() * (X.data() - observed->Y).array()).square().sum();
    }
    if (weights.alpha != 0.0) out.smoothness = weights.alpha * smoothness_factored(X, Lp, Lq);
    out.frobenius = weights.beta1 * Lp.matrix().squaredNorm() + weights.beta2 * Lq.matrix().squaredNorm();
    if (weights.gamma_nuc != 0.0) {
        std::vector<double> terms(static_cast<std::size_t>(X.T()));
        for (Index i = 0; i < X.T(); ++i) terms[i] = nuclear_norm(X.snapshot(i));
        out.nuclear = weights.gamma_nuc * pairwise_sum(terms);
    }
    out.total = out.data_fit + out.smoothness + out.frobenius + out.nuclear;
    return out;
}

}  // namespace pgl

#pragma once

#include <cstddef>

#include "pgl/graph.hpp"
#include "pgl/signal.hpp"

namespace pgl {

struct EdgeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    std::size_t true_edges = 0;
    std::size_t est_edges = 0;
    std::size_t matched = 0;
};

/// Edge-support recovery. Both Laplacians are trace-normalized to n before
/// thresholding. Two empty edge sets score 1; otherwise an empty side gives
/// precision (or recall) 0.
EdgeScore f_measure(const Laplacian& truth, const Laplacian& estimate,
                    double threshold = kDefaultEdgeThreshold);

EdgeScore score_edge_sets(const EdgeSet& truth, const EdgeSet& estimate);

struct ObjectiveWeights {
    double alpha = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double gamma_nuc = 0.0;
};

struct ObjectiveBreakdown {
    double data_fit = 0.0;    // sum ||mask o (X - Y)||_F^2 (0 without observations)
    double smoothness = 0.0;  // alpha * sum tr(X^T Lp X) + tr(X Lq X^T)
    double frobenius = 0.0;   // beta1 ||Lp||^2 + beta2 ||Lq||^2
    double nuclear = 0.0;     // gamma * sum ||X_i||_*
    double total = 0.0;
};

/// Joint objective; pass `observed` to include the masked data-fit term.
ObjectiveBreakdown objective_value(const MultidomainData& X, const Laplacian& Lp,
                                   const Laplacian& Lq, const ObjectiveWeights& weights,
                                   const MaskedData* observed = nullptr);

double nuclear_norm(const Matrix& M);

}  // namespace pgl

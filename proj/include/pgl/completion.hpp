#pragma once

// Joint matrix completion and product-graph learning. With the graphs fixed,
// each snapshot X_i solves
//
//     min ||mask o (X - Y)||_F^2 + alpha [tr(X^T Lp X) + tr(X Lq X^T)] + gamma ||X||_*
//
// by proximal gradient with singular-value thresholding; with X fixed, the
// graphs come from learn_product_graph.

#include <vector>

#include "pgl/learners.hpp"
#include "pgl/signal.hpp"

namespace pgl {

struct CompletionConfig {
    double alpha = 0.1;
    double gamma_nuc = 1.0;
    int inner_iters = 300;
    int outer_iters = 50;
    double tol_outer = 1e-4;
    /// Relative movement below which an inner loop stops early.
    double tol_inner = 1e-12;

    void validate() const;
};

/// U max(S - tau, 0) V^T.
Matrix svt(const Matrix& M, double tau);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_lambda_max(const Matrix& A, int iters = 100, double tol = 1e-10);

/// Completed signals for fixed factor graphs. `start` (default: zero-filled Y)
/// is the initial iterate; the composite objective never increases from it.
MultidomainData complete_signals(const MaskedData& masked, const Laplacian& Lp, const Laplacian& Lq,
                                 const CompletionConfig& cfg, const MultidomainData* start = nullptr);

/// Zero-filled initial estimate: observed entries of Y, 0 elsewhere.
MultidomainData zero_filled(const MaskedData& masked);

struct JointResult {
    MultidomainData X;
    Laplacian Lp;
    Laplacian Lq;
    /// Total objective after each outer iteration (graph step + completion step),
    /// in the units of the (possibly normalized) data.
    std::vector<double> objective_trace;
    int outer_iterations = 0;
    bool converged = false;
    double scale = 1.0;  // factor applied to Y before solving
};

/// Alternates graph learning and completion starting from the zero-filled data.
/// The smoothness weight of both steps is learn_cfg.alpha. When
/// learn_cfg.normalize_data is set, Y is rescaled once up front (from its
/// observed entries) and X is returned in the original units.
JointResult alternate_joint(const MaskedData& masked, const LearnConfig& learn_cfg,
                            const CompletionConfig& comp_cfg);

/// RMSE over the hidden entries (mask == 0) between an estimate and the truth.
double masked_rmse(const Matrix& estimate, const Matrix& truth, const Matrix& mask);

/// Baseline: hidden entries filled with the mean of the observed entries in
/// the same column (snapshot).
Matrix column_mean_fill(const MaskedData& masked);

}  // namespace pgl

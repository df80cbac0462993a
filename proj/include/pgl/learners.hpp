#pragma once

// Product-graph learning pipelines.
//
//   learn_product_graph: one QP with K = (P^2 + P + Q^2 + Q) / 2 variables
//                        over both factors, solved by water-filling.
//   learn_two_step:      full N x N Laplacian first (N(N+1)/2 variables),
//                        then the nearest Kronecker-sum factorization.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "pgl/generic_qp.hpp"
#include "pgl/qp.hpp"
#include "pgl/signal.hpp"
#include "pgl/waterfill.hpp"

namespace pgl {

enum class SolverKind { Waterfill, ProjectedGradient };

SolverKind parse_solver_kind(const std::string& name);
const char* to_string(SolverKind kind);

inline constexpr double kZeroBetaRidge = 1e-10;

struct SolverSettings {
    SolverKind kind = SolverKind::Waterfill;
    WaterfillOptions waterfill;
    PGOptions pg;
};

struct LearnConfig {
    double alpha = 0.1;
    double beta1 = 1.0;
    double beta2 = 1.0;
    SolverSettings solver;
    /// Rescale the data so the mean per-snapshot energy is 1 before learning.
    bool normalize_data = true;

    void validate() const;
};

struct FactorLaplacians {
    Laplacian Lp;
    Laplacian Lq;
};

struct TwoStepResult {
    Laplacian Lp;
    Laplacian Lq;
    Laplacian Ln_full;
};

/// Diagnostics from the last QP solve, for CLI traces and dumps.
struct SolveReport {
    SolverKind used = SolverKind::Waterfill;
    int iterations = 0;
    double primal_residual = 0.0;
    bool fell_back = false;  // water-filling refused beta = 0 and PG was used
    std::vector<WaterfillTraceRow> trace;
};

/// Minimizer of a StandardQP according to `settings`. A water-filling request
/// on a problem with a zero Hessian entry is rerouted to projected gradient
/// with kZeroBetaRidge added (and a warning on std::clog).
/// Throws SolverError(NotConverged) when the chosen solver does not converge.
Vector solve_qp(const StandardQP& qp, const SolverSettings& settings, SolveReport* report = nullptr);

/// Global rescale factor applied when normalize_data is on.
double normalization_scale(const Matrix& data);

FactorLaplacians learn_product_graph(const MultidomainData& data, const LearnConfig& cfg,
                                     SolveReport* report = nullptr);

/// Factors of a given full Laplacian (the second step of learn_two_step).
FactorLaplacians factorize_laplacian(const Laplacian& Ln, Index P, Index Q,
                                     const SolverSettings& settings);

TwoStepResult learn_two_step(const MultidomainData& data, const LearnConfig& cfg_full,
                             const SolverSettings& cfg_factor);

/// alpha * smoothness + beta1 ||Lp||^2 + beta2 ||Lq||^2 on the data as given.
double factor_objective(const MultidomainData& data, const Laplacian& Lp, const Laplacian& Lq,
                        double alpha, double beta1, double beta2);

// ---- grid search -----------------------------------------------------------

struct GridPoint {
    double alpha = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

/// alpha in {0.01, 0.1, 1} x beta1 = beta2 in {0.1, 0.5, 1, 5}.
std::vector<GridPoint> default_grid();

enum class Method { OneStep, TwoStep };

struct GridRow {
    GridPoint point;
    double f_p = 0.0;
    double f_q = 0.0;
    double f_n = 0.0;
    double score = 0.0;  // (f_p + f_q) / 2
    double seconds = 0.0;
};

struct GridSearchResult {
    std::size_t best_index = 0;
    GridPoint best;
    std::vector<GridRow> rows;  // in grid order
};

struct GridSearchOptions {
    Method method = Method::OneStep;
    SolverSettings solver;
    bool normalize_data = true;
    double threshold = kDefaultEdgeThreshold;
    unsigned jobs = 1;
};

/// Scores every grid point by the mean F-measure of the two factors and
/// returns the first point attaining the maximum.
GridSearchResult grid_search(const MultidomainData& data, const std::vector<GridPoint>& grid,
                             const FactorLaplacians& truth, const GridSearchOptions& opts);

}  // namespace pgl

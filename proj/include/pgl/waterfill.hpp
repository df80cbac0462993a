#pragma once

// Explicit KKT solution of a StandardQP with strictly positive diagonal
// Hessian. For multipliers mu of the equality rows, the minimizing primal is
//
//     z_i(mu) = max{0, (c_i^T mu - q_i) / h_i}
//
// and mu* solves C z(mu) = b. Each row of that system is a monotone
// piecewise-linear equation in its own multiplier (one "water level"); the
// solver cycles over rows and solves each exactly by sorting breakpoints,
// which is coordinate ascent on the concave dual
//
//     g(mu) = b^T mu - 1/2 sum_i max{0, c_i^T mu - q_i}^2 / h_i.

#include <span>
#include <vector>

#include "pgl/qp.hpp"

namespace pgl {

struct WaterfillOptions {
    int max_sweeps = 10000;
    double tol_primal = 1e-8;  // ||Cz - b||_inf
    double tol_kkt = 1e-8;     // sign and complementarity of the bound multipliers
    double damping = 1.0;      // step toward each exact level, in (0, 1]
    bool record_trace = false;

    void validate() const;
};

struct WaterfillTraceRow {
    int sweep = 0;
    double primal_residual = 0.0;
    double dual_objective = 0.0;
};

struct WaterfillResult {
    Vector z;
    Vector mu;
    int sweeps_used = 0;
    double primal_residual = 0.0;
    double kkt_residual = 0.0;
    bool converged = false;
    std::vector<WaterfillTraceRow> trace;
};

/// Throws SolverError(ZeroCurvature) when some h_i <= 0 and
/// SolverError(UnboundedLevel) when a row cannot be met at any level.
/// Running out of sweeps is reported through `converged`, not thrown.
WaterfillResult solve_waterfill(const StandardQP& qp, const WaterfillOptions& opts = {});

/// Exact level for row `row` with the other multipliers held at `mu`.
double scalar_water_level(Index row, const StandardQP& qp, const Vector& mu);

/// z(mu) = max{0, (C^T mu - q) / h}.
Vector primal_from_multipliers(const StandardQP& qp, const Vector& mu);

double dual_objective(const StandardQP& qp, const Vector& mu);

/// max over i of max(0, -lambda_i) and |z_i lambda_i| with
/// lambda = diag(h) z + q - C^T mu.
double kkt_residual(const StandardQP& qp, const Vector& z, const Vector& mu);

/// Solve sum_k c_k max{0, (c_k m + r_k) / h_k} = target for m. When a whole
/// interval of levels solves it, the point of that interval nearest to
/// `current` is returned. Throws SolverError(UnboundedLevel) if no level does.
double solve_level(std::span<const double> c, std::span<const double> r, std::span<const double> h,
                   double target, double current);

}  // namespace pgl

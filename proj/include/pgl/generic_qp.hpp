#pragma once

// Reference solver for StandardQP: projected gradient, where the projection
// onto {Cz = b, z >= 0} is computed by Dykstra's alternating projections
// between the affine set and the nonnegative orthant.

#include "pgl/qp.hpp"

namespace pgl {

enum class StepRule { Fixed, Backtracking };

struct PGOptions {
    int max_iters = 200000;
    StepRule step_rule = StepRule::Fixed;
    double tol = 1e-7;
    int projection_iters = 2000;
    double projection_tol = 1e-13;
    /// Added to every Hessian entry; makes beta = 0 problems strictly convex.
    double ridge = 0.0;

    void validate() const;
};

struct PGResult {
    Vector z;
    int iterations = 0;
    double stationarity = 0.0;  // ||z - Proj(z - s grad)||_inf / s, s = min(1/L, step cap)
    double feasibility = 0.0;   // ||Cz - b||_inf
    double objective = 0.0;     // with the ridge included
    bool converged = false;
};

/// Projection onto {Cz = b, z >= 0} of a QP's constraint set.
class FeasibleSetProjector {
public:
    FeasibleSetProjector(const StandardQP& qp, int max_iters, double tol);

    Vector affine(const Vector& y) const;
    Vector project(const Vector& y) const;

private:
    Vector polish(const Vector& y, const Vector& x) const;

    const StandardQP& qp_;
    Matrix pinv_;  // K x M pseudoinverse of C
    int max_iters_;
    double tol_;
};

/// Iteration-budget exhaustion is reported through `converged`.
PGResult solve_projected_gradient(const StandardQP& qp, const PGOptions& opts = {});

}  // namespace pgl

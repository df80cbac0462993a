#include "pgl/generic_qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pgl/error.hpp"

namespace pgl {

void PGOptions::validate() const {
    if (max_iters < 1) throw std::invalid_argument("projected gradient: max_iters must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("projected gradient: tol must be positive");
    if (projection_iters < 1) throw std::invalid_argument("projected gradient: projection_iters >= 1");
    if (!(ridge >= 0.0)) throw std::invalid_argument("projected gradient: ridge must be >= 0");
}

FeasibleSetProjector::FeasibleSetProjector(const StandardQP& qp, int max_iters, double tol)
    : qp_(qp), max_iters_(max_iters), tol_(tol) {
    pinv_ = qp.C.completeOrthogonalDecomposition().pseudoInverse();
}

Vector FeasibleSetProjector::affine(const Vector& y) const {
    return y - pinv_ * (qp_.C * y - qp_.b);
}

Vector FeasibleSetProjector::project(const Vector& y) const {
    // Dykstra: x_a = P_A(x + p), p += x - x_a; x = P_+(x_a + r), r += x_a - x.
    Vector x = y;
    Vector p = Vector::Zero(y.size());
    Vector r = Vector::Zero(y.size());
    for (int it = 0; it < max_iters_; ++it) {
        const Vector xa = affine(x + p);
        p += x - xa;
        const Vector xb = (xa + r).cwiseMax(0.0);
        r += xa - xb;
        const double moved = (xb - x).cwiseAbs().maxCoeff();
        x = xb;
        if (moved <= tol_) break;
    }
    return polish(y, x);
}

Vector FeasibleSetProjector::polish(const Vector& y, const Vector& x) const {
    // Dykstra converges slowly near the end. With its support S, the exact
    // projection is z_S = y_S + C_S^T nu and z = 0 off S, where
    // C_S C_S^T nu = b - C_S y_S; keep it only if it satisfies the KKT signs.
    const Index K = y.size();
    std::vector<Index> support;
    for (Index i = 0; i < K; ++i) {
        if (x[i] > 0.0) support.push_back(i);
    }
    if (support.empty()) return x;
    Matrix Cs(qp_.M(), static_cast<Index>(support.size()));
    Vector ys(Cs.cols());
    for (Index k = 0; k < Cs.cols(); ++k) {
        Cs.col(k) = qp_.C.col(support[k]);
        ys[k] = y[support[k]];
    }
    const Matrix gram = Cs * Cs.transpose();
    const Vector nu = gram.completeOrthogonalDecomposition().solve(qp_.b - Cs * ys);
    const Vector shift = qp_.C.transpose() * nu;
    const double scale = 1.0 + y.cwiseAbs().maxCoeff();
    const double slack = 1e-12 * scale;
    Vector z = Vector::Zero(K);
    for (Index k = 0; k < Cs.cols(); ++k) {
        const double v = ys[k] + shift[support[k]];
        if (v < -slack) return x;
        z[support[k]] = std::max(0.0, v);
    }
    for (Index i = 0; i < K; ++i) {
        if (x[i] <= 0.0 && y[i] + shift[i] > slack) return x;
    }
    const double res = (qp_.C * z - qp_.b).cwiseAbs().maxCoeff();
    return res <= (qp_.C * x - qp_.b).cwiseAbs().maxCoeff() + slack ? z : x;
}

namespace {

PGResult finish(const StandardQP& qp, const Vector& h, Vector z, int iters, double stationarity,
                bool converged) {
    PGResult out;
    out.feasibility = qp.primal_residual(z);
    out.objective = 0.5 * (h.array() * z.array().square()).sum() + qp.q.dot(z);
    out.z = std::move(z);
    out.iterations = iters;
    out.stationarity = stationarity;
    out.converged = converged;
    return out;
}

}  // namespace

PGResult solve_projected_gradient(const StandardQP& qp, const PGOptions& opts) {
    opts.validate();
    qp.validate();
    const Vector h = qp.hess_diag.array() + opts.ridge;
    const double lipschitz = h.maxCoeff();
    if (!(lipschitz > 0.0)) {
        throw SolverError(SolverFailure::ZeroCurvature,
                          "projected gradient needs a positive Hessian entry or ridge");
    }
    const FeasibleSetProjector proj(qp, opts.projection_iters, opts.projection_tol);
    auto objective = [&](const Vector& z) {
        return 0.5 * (h.array() * z.array().square()).sum() + qp.q.dot(z);
    };

    Vector z = proj.project(Vector::Zero(qp.K()));
    if (qp.primal_residual(z) > 1e3 * opts.tol + 1e-6) {
        throw SolverError(SolverFailure::Infeasible, "could not find a feasible starting point");
    }
    // Steps beyond 1/L are never needed, and steps far beyond the scale of z
    // (near-zero curvature) make the projection numerically meaningless.
    const double max_step = 10.0 * (1.0 + qp.b.cwiseAbs().maxCoeff()) / (1.0 + qp.q.cwiseAbs().maxCoeff());
    const double base_step = std::min(1.0 / lipschitz, max_step);
    double step = base_step;
    double stationarity = 0.0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        const Vector grad = (h.array() * z.array()).matrix() + qp.q;
        Vector next = proj.project(z - step * grad);
        if (opts.step_rule == StepRule::Backtracking) {
            // Grow optimistically, then shrink until the quadratic upper model holds.
            step = std::min(2.0 * step, max_step);
            const double fz = objective(z);
            for (int tries = 0; tries < 60; ++tries) {
                next = proj.project(z - step * grad);
                const Vector d = next - z;
                if (objective(next) <= fz + grad.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-15) break;
                step *= 0.5;
            }
        }
        if (opts.step_rule == StepRule::Backtracking) {
            // Measured at the reference step so that a grown step does not
            // amplify the projection error.
            const Vector ref = proj.project(next - base_step * ((h.array() * next.array()).matrix() + qp.q));
            stationarity = (ref - next).cwiseAbs().maxCoeff() / base_step;
        } else {
            stationarity = (next - z).cwiseAbs().maxCoeff() / step;
        }
        z = std::move(next);
        if (!z.allFinite()) throw SolverError(SolverFailure::NonFinite, "iterate is not finite");
        if (stationarity <= opts.tol && qp.primal_residual(z) <= opts.tol) {
            return finish(qp, h, std::move(z), it, stationarity, true);
        }
    }
    return finish(qp, h, std::move(z), opts.max_iters, stationarity, false);
}

}  // namespace pgl

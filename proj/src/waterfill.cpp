#include "pgl/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pgl/error.hpp"

namespace pgl {

void WaterfillOptions::validate() const {
    if (max_sweeps < 1) throw std::invalid_argument("waterfill: max_sweeps must be >= 1");
    if (!(tol_primal > 0.0) || !(tol_kkt > 0.0)) {
        throw std::invalid_argument("waterfill: tolerances must be positive");
    }
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw std::invalid_argument("waterfill: damping must lie in (0, 1]");
    }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Breakpoint {
    double at;
    Index slot;
};

// Sweeps the sorted breakpoints once, tracking slope and intercept of the
// active linear piece, and returns the smallest m with f(m) >= target
// (strict == false) or with f(m) > target (strict == true); for the latter
// the returned m is the right end of the plateau f == target.
double locate(std::span<const double> c, std::span<const double> r, std::span<const double> h,
              const std::vector<Breakpoint>& order, double target, bool strict) {
    double slope = 0.0;
    double intercept = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] < 0.0) {
            slope += c[k] * c[k] / h[k];
            intercept += c[k] * r[k] / h[k];
        }
    }
    auto reached = [&](double value) { return strict ? value > target : value >= target; };
    double left = -kInf;
    for (const Breakpoint& bp : order) {
        const double value = slope * bp.at + intercept;
        if (reached(value)) {
            if (slope > 0.0) return std::max(left, (target - intercept) / slope);
            // Flat piece that already meets the target: the level set extends to -inf
            // only on the first piece; elsewhere the flat piece starts at `left`.
            return left;
        }
        const Index k = bp.slot;
        const double dA = c[k] * c[k] / h[k];
        const double dB = c[k] * r[k] / h[k];
        if (c[k] > 0.0) {
            slope += dA;
            intercept += dB;
        } else {
            slope -= dA;
            intercept -= dB;
        }
        left = bp.at;
    }
    if (slope > 0.0) return std::max(left, (target - intercept) / slope);
    // Constant beyond the last breakpoint.
    const double value = intercept + slope * (std::isfinite(left) ? left : 0.0);
    return reached(value) ? left : kInf;
}

}  // namespace

double solve_level(std::span<const double> c, std::span<const double> r, std::span<const double> h,
                   double target, double current) {
    std::vector<Breakpoint> order;
    order.reserve(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0.0) continue;
        order.push_back({-r[k] / c[k], static_cast<Index>(k)});
    }
    std::sort(order.begin(), order.end(),
              [](const Breakpoint& a, const Breakpoint& b) { return a.at < b.at; });
    const double lo = locate(c, r, h, order, target, false);
    const double hi = locate(c, r, h, order, target, true);
    if (lo == kInf || hi == -kInf) {
        throw SolverError(SolverFailure::UnboundedLevel,
                          "no water level meets target " + std::to_string(target));
    }
    if (!(hi > lo)) return lo;
    return std::clamp(current, lo, hi);
}

namespace {

struct RowPattern {
    std::vector<Index> slots;
    std::vector<double> coef;
};

std::vector<RowPattern> row_patterns(const StandardQP& qp) {
    std::vector<RowPattern> rows(static_cast<std::size_t>(qp.M()));
    for (Index j = 0; j < qp.M(); ++j) {
        for (Index i = 0; i < qp.K(); ++i) {
            const double v = qp.C(j, i);
            if (v != 0.0) {
                rows[j].slots.push_back(i);
                rows[j].coef.push_back(v);
            }
        }
    }
    return rows;
}

void check_curvature(const StandardQP& qp) {
    for (Index i = 0; i < qp.K(); ++i) {
        if (!(qp.hess_diag[i] > 0.0)) {
            throw SolverError(SolverFailure::ZeroCurvature,
                              "Hessian entry " + std::to_string(i) +
                                  " is not positive; use the projected-gradient solver");
        }
    }
}

// s = C^T mu via the sparse row patterns.
void multiplier_image(const std::vector<RowPattern>& rows, const Vector& mu, Vector& s) {
    s.setZero();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const double m = mu[static_cast<Index>(j)];
        if (m == 0.0) continue;
        const RowPattern& row = rows[j];
        for (std::size_t k = 0; k < row.slots.size(); ++k) s[row.slots[k]] += row.coef[k] * m;
    }
}

double dual_from_image(const StandardQP& qp, const Vector& mu, const Vector& s) {
    double penalty = 0.0;
    for (Index i = 0; i < qp.K(); ++i) {
        const double a = std::max(0.0, s[i] - qp.q[i]);
        penalty += a * a / qp.hess_diag[i];
    }
    return qp.b.dot(mu) - 0.5 * penalty;
}

void primal_from_image(const StandardQP& qp, const Vector& s, Vector& z) {
    for (Index i = 0; i < qp.K(); ++i) z[i] = std::max(0.0, (s[i] - qp.q[i]) / qp.hess_diag[i]);
}

double residual_of(const std::vector<RowPattern>& rows, const StandardQP& qp, const Vector& z) {
    double worst = 0.0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rows[j].slots.size(); ++k) acc += rows[j].coef[k] * z[rows[j].slots[k]];
        worst = std::max(worst, std::abs(acc - qp.b[static_cast<Index>(j)]));
    }
    return worst;
}

}  // namespace

Vector primal_from_multipliers(const StandardQP& qp, const Vector& mu) {
    const Vector s = qp.C.transpose() * mu;
    Vector z(qp.K());
    primal_from_image(qp, s, z);
    return z;
}

double dual_objective(const StandardQP& qp, const Vector& mu) {
    const Vector s = qp.C.transpose() * mu;
    return dual_from_image(qp, mu, s);
}

double kkt_residual(const StandardQP& qp, const Vector& z, const Vector& mu) {
    const Vector lambda = (qp.hess_diag.array() * z.array()).matrix() + qp.q - qp.C.transpose() * mu;
    double worst = 0.0;
    for (Index i = 0; i < qp.K(); ++i) {
        worst = std::max({worst, -lambda[i], std::abs(z[i] * lambda[i])});
    }
    return worst;
}

double scalar_water_level(Index row, const StandardQP& qp, const Vector& mu) {
    if (row < 0 || row >= qp.M()) throw std::out_of_range("scalar_water_level: row out of range");
    if (mu.size() != qp.M()) throw DimensionError("multiplier vector has wrong length");
    check_curvature(qp);
    const Vector s = qp.C.transpose() * mu;
    std::vector<double> c, r, h;
    for (Index i = 0; i < qp.K(); ++i) {
        const double cji = qp.C(row, i);
        if (cji == 0.0) continue;
        c.push_back(cji);
        r.push_back(s[i] - cji * mu[row] - qp.q[i]);
        h.push_back(qp.hess_diag[i]);
    }
    return solve_level(c, r, h, qp.b[row], mu[row]);
}

WaterfillResult solve_waterfill(const StandardQP& qp, const WaterfillOptions& opts) {
    opts.validate();
    qp.validate();
    check_curvature(qp);

    const std::vector<RowPattern> rows = row_patterns(qp);
    WaterfillResult out;
    out.mu = Vector::Zero(qp.M());
    out.z = Vector::Zero(qp.K());
    Vector s = Vector::Zero(qp.K());

    std::vector<double> c, r, h;
    double damping = opts.damping;
    double previous_dual = dual_from_image(qp, out.mu, s);

    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const RowPattern& row = rows[j];
            const Index jj = static_cast<Index>(j);
            const double mu_j = out.mu[jj];
            c.clear();
            r.clear();
            h.clear();
            double filled = 0.0;
            for (std::size_t k = 0; k < row.slots.size(); ++k) {
                const Index i = row.slots[k];
                const double cji = row.coef[k];
                filled += cji * std::max(0.0, (s[i] - qp.q[i]) / qp.hess_diag[i]);
                c.push_back(cji);
                r.push_back(s[i] - cji * mu_j - qp.q[i]);
                h.push_back(qp.hess_diag[i]);
            }
            // Row already met exactly (e.g. implied by the others): nothing to do.
            if (filled == qp.b[jj]) continue;
            const double level = solve_level(c, r, h, qp.b[jj], mu_j);
            const double delta = damping * (level - mu_j);
            if (delta == 0.0) continue;
            out.mu[jj] = mu_j + delta;
            for (std::size_t k = 0; k < row.slots.size(); ++k) s[row.slots[k]] += row.coef[k] * delta;
        }

        // Fresh image each sweep keeps incremental rounding from accumulating.
        multiplier_image(rows, out.mu, s);
        primal_from_image(qp, s, out.z);
        out.primal_residual = residual_of(rows, qp, out.z);
        const double dual = dual_from_image(qp, out.mu, s);
        if (!std::isfinite(dual)) {
            throw SolverError(SolverFailure::NonFinite, "dual objective is not finite");
        }
        if (dual < previous_dual - 1e-12 * (1.0 + std::abs(previous_dual)) && damping > 0.5) {
            damping = 0.5;
        }
        previous_dual = dual;
        out.sweeps_used = sweep;
        if (opts.record_trace) out.trace.push_back({sweep, out.primal_residual, dual});
        if (out.primal_residual <= opts.tol_primal) {
            out.kkt_residual = kkt_residual(qp, out.z, out.mu);
            if (out.kkt_residual <= opts.tol_kkt) {
                out.converged = true;
                return out;
            }
        }
    }
    out.kkt_residual = kkt_residual(qp, out.z, out.mu);
    return out;
}

}  // namespace pgl

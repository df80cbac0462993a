#include "pgl/completion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

#include "pgl/error.hpp"
#include "pgl/evaluation.hpp"

namespace pgl {

void CompletionConfig::validate() const {
    if (!(alpha >= 0.0) || !(gamma_nuc >= 0.0)) {
        throw std::invalid_argument("completion: weights must be nonnegative");
    }
    if (inner_iters < 1 || outer_iters < 1) throw std::invalid_argument("completion: iters must be >= 1");
    if (!(tol_outer > 0.0)) throw std::invalid_argument("completion: tol_outer must be positive");
}

Matrix svt(const Matrix& M, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("svt: tau must be >= 0");
    if (tau == 0.0 || M.size() == 0) return M;
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector shrunk = (svd.singularValues().array() - tau).cwiseMax(0.0);
    return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

double power_lambda_max(const Matrix& A, int iters, double tol) {
    const Index n = A.rows();
    if (n == 0) return 0.0;
    // Deterministic start with components in every direction generically.
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = 1.0 + std::fmod(0.6180339887498949 * (i + 1), 1.0);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vector w = A * v;
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

MultidomainData zero_filled(const MaskedData& masked) {
    check_masked(masked);
    return MultidomainData(masked.P, masked.Q, (masked.mask.array() * masked.Y.array()).matrix());
}

namespace {

struct SnapshotProblem {
    Eigen::Map<const Matrix> Y;
    Eigen::Map<const Matrix> mask;
    const Matrix& Lp;
    const Matrix& Lq;
    double alpha;
    double gamma;

    Matrix gradient(const Matrix& X) const {
        return 2.0 * mask.cwiseProduct(X - Y) + 2.0 * alpha * (Lp * X + X * Lq);
    }
    double objective(const Matrix& X) const {
        double f = mask.cwiseProduct(X - Y).squaredNorm();
        if (alpha != 0.0) f += alpha * ((X.array() * (Lp * X).array()).sum() + (X.array() * (X * Lq).array()).sum());
        if (gamma != 0.0) f += gamma * nuclear_norm(X);
        return f;
    }
};

}  // namespace

MultidomainData complete_signals(const MaskedData& masked, const Laplacian& Lp, const Laplacian& Lq,
                                 const CompletionConfig& cfg, const MultidomainData* start) {
    cfg.validate();
    check_masked(masked);
    if (Lp.n() != masked.P || Lq.n() != masked.Q) throw DimensionError("factor sizes do not match data");
    MultidomainData X = start ? *start : zero_filled(masked);
    if (X.P() != masked.P || X.Q() != masked.Q || X.T() != masked.T()) {
        throw DimensionError("initial estimate shape does not match data");
    }
    // Upper bound on the gradient's Lipschitz constant; the small inflation
    // covers power-iteration underestimates.
    const double lip = 2.0 + 2.0 * cfg.alpha * (power_lambda_max(Lp.matrix()) + power_lambda_max(Lq.matrix()));
    const double step = 1.0 / (lip * (1.0 + 1e-6));

    for (Index t = 0; t < masked.T(); ++t) {
        const Eigen::Map<const Matrix> mask_t(masked.mask.col(t).data(), masked.P, masked.Q);
        // Unobserved entries of Y must not leak in through the mask product.
        const Matrix Yt = mask_t.cwiseProduct(Eigen::Map<const Matrix>(masked.Y.col(t).data(), masked.P, masked.Q));
        const SnapshotProblem clean{Eigen::Map<const Matrix>(Yt.data(), masked.P, masked.Q), mask_t,
                                    Lp.matrix(), Lq.matrix(), cfg.alpha, cfg.gamma_nuc};
        Matrix Xt = X.snapshot(t);
        double f = clean.objective(Xt);
        if (!std::isfinite(f)) throw SolverError(SolverFailure::NonFinite, "completion objective");
        for (int it = 0; it < cfg.inner_iters; ++it) {
            Matrix next = svt(Xt - step * clean.gradient(Xt), step * cfg.gamma_nuc);
            const double fn = clean.objective(next);
            if (!std::isfinite(fn)) throw SolverError(SolverFailure::NonFinite, "completion objective");
            // Rounding can push a converged iterate up by a few ulps; keep the better one.
            if (fn > f) break;
            const double moved = (next - Xt).norm();
            Xt = std::move(next);
            f = fn;
            if (moved <= cfg.tol_inner * (1.0 + Xt.norm())) break;
        }
        X.snapshot(t) = Xt;
    }
    return X;
}

JointResult alternate_joint(const MaskedData& masked, const LearnConfig& learn_cfg,
                            const CompletionConfig& comp_cfg) {
    learn_cfg.validate();
    comp_cfg.validate();
    check_masked(masked);
    for (Index t = 0; t < masked.T(); ++t) {
        if (masked.mask.col(t).sum() < 1.0) {
            throw DataError("snapshot " + std::to_string(t) + " has no observed entries");
        }
    }

    MaskedData work = masked;
    double scale = 1.0;
    if (learn_cfg.normalize_data) {
        const Matrix observed = (masked.mask.array() * masked.Y.array()).matrix();
        scale = normalization_scale(observed);
        work.Y = observed * scale;
    }
    LearnConfig graph_cfg = learn_cfg;
    graph_cfg.normalize_data = false;
    CompletionConfig inner = comp_cfg;
    inner.alpha = learn_cfg.alpha;
    const ObjectiveWeights weights{learn_cfg.alpha, learn_cfg.beta1, learn_cfg.beta2, comp_cfg.gamma_nuc};

    JointResult out;
    out.scale = scale;
    out.X = zero_filled(work);
    double previous = std::numeric_limits<double>::infinity();
    for (int outer = 1; outer <= comp_cfg.outer_iters; ++outer) {
        FactorLaplacians graphs = learn_product_graph(out.X, graph_cfg);
        out.Lp = std::move(graphs.Lp);
        out.Lq = std::move(graphs.Lq);
        out.X = complete_signals(work, out.Lp, out.Lq, inner, &out.X);
        const double total = objective_value(out.X, out.Lp, out.Lq, weights, &work).total;
        out.objective_trace.push_back(total);
        out.outer_iterations = outer;
        if (std::isfinite(previous) &&
            std::abs(previous - total) <= comp_cfg.tol_outer * std::max(std::abs(previous), 1e-300)) {
            out.converged = true;
            break;
        }
        previous = total;
    }
    if (scale != 1.0) out.X.data() /= scale;
    return out;
}

double masked_rmse(const Matrix& estimate, const Matrix& truth, const Matrix& mask) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() ||
        mask.rows() != truth.rows() || mask.cols() != truth.cols()) {
        throw DimensionError("masked_rmse: shape mismatch");
    }
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < truth.size(); ++i) {
        if (mask.data()[i] == 0.0) {
            const double d = estimate.data()[i] - truth.data()[i];
            sum += d * d;
            ++count;
        }
    }
    return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

Matrix column_mean_fill(const MaskedData& masked) {
    check_masked(masked);
    Matrix out = masked.Y;
    for (Index t = 0; t < masked.T(); ++t) {
        double sum = 0.0;
        double count = 0.0;
        for (Index i = 0; i < masked.N(); ++i) {
            if (masked.mask(i, t) != 0.0) {
                sum += masked.Y(i, t);
                count += 1.0;
            }
        }
        const double mean = count > 0.0 ? sum / count : 0.0;
        for (Index i = 0; i < masked.N(); ++i) {
            if (masked.mask(i, t) == 0.0) out(i, t) = mean;
        }
    }
    return out;
}

}  // namespace pgl

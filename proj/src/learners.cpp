#include "pgl/learners.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "pgl/error.hpp"
#include "pgl/evaluation.hpp"

namespace pgl {

SolverKind parse_solver_kind(const std::string& name) {
    if (name == "waterfill") return SolverKind::Waterfill;
    if (name == "pg") return SolverKind::ProjectedGradient;
    throw std::invalid_argument("unknown solver '" + name + "' (expected waterfill or pg)");
}

const char* to_string(SolverKind kind) {
    return kind == SolverKind::Waterfill ? "waterfill" : "pg";
}

void LearnConfig::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(beta1 >= 0.0) || !(beta2 >= 0.0)) throw std::invalid_argument("betas must be >= 0");
}

Vector solve_qp(const StandardQP& qp, const SolverSettings& settings, SolveReport* report) {
    SolveReport local;
    SolveReport& rep = report ? *report : local;
    rep = SolveReport{};

    SolverKind kind = settings.kind;
    PGOptions pg = settings.pg;
    if (kind == SolverKind::Waterfill && (qp.hess_diag.array() <= 0.0).any()) {
        std::clog << "warning: zero curvature (beta = 0); solving with projected gradient and ridge "
                  << kZeroBetaRidge << "\n";
        kind = SolverKind::ProjectedGradient;
        pg.ridge = std::max(pg.ridge, kZeroBetaRidge);
        rep.fell_back = true;
    }
    rep.used = kind;

    if (kind == SolverKind::Waterfill) {
        WaterfillOptions wf = settings.waterfill;
        WaterfillResult res = solve_waterfill(qp, wf);
        rep.iterations = res.sweeps_used;
        rep.primal_residual = res.primal_residual;
        rep.trace = std::move(res.trace);
        if (!res.converged) {
            throw SolverError(SolverFailure::NotConverged,
                              "water-filling after " + std::to_string(res.sweeps_used) +
                                  " sweeps: primal residual " + std::to_string(res.primal_residual) +
                                  ", KKT residual " + std::to_string(res.kkt_residual));
        }
        return std::move(res.z);
    }
    PGResult res = solve_projected_gradient(qp, pg);
    rep.iterations = res.iterations;
    rep.primal_residual = res.feasibility;
    if (!res.converged) {
        throw SolverError(SolverFailure::NotConverged,
                          "projected gradient after " + std::to_string(res.iterations) +
                              " iterations: stationarity " + std::to_string(res.stationarity) +
                              ", feasibility " + std::to_string(res.feasibility));
    }
    return std::move(res.z);
}

double normalization_scale(const Matrix& data) {
    const double energy = mean_snapshot_energy(data);
    return energy > 0.0 ? 1.0 / std::sqrt(energy) : 1.0;
}

namespace {

MultidomainData prepared(const MultidomainData& data, bool normalize) {
    if (!normalize) return data;
    return MultidomainData(data.P(), data.Q(), data.data() * normalization_scale(data.data()));
}

void check_factor_sizes(Index P, Index Q) {
    // A 1-node Laplacian is zero and cannot carry trace 1.
    if (P < 2 || Q < 2) throw DimensionError("learning needs P >= 2 and Q >= 2");
}

}  // namespace

FactorLaplacians learn_product_graph(const MultidomainData& data, const LearnConfig& cfg,
                                     SolveReport* report) {
    cfg.validate();
    check_factor_sizes(data.P(), data.Q());
    if (data.T() < 1) throw DimensionError("learning needs at least one snapshot");
    const StandardQP qp = build_factor_qp(prepared(data, cfg.normalize_data), cfg.alpha, cfg.beta1, cfg.beta2);
    const Vector z = solve_qp(qp, cfg.solver, report);
    return {qp.block_laplacian(z, 0), qp.block_laplacian(z, 1)};
}

FactorLaplacians factorize_laplacian(const Laplacian& Ln, Index P, Index Q,
                                     const SolverSettings& settings) {
    check_factor_sizes(P, Q);
    const StandardQP qp = build_factorization_qp(Ln, P, Q);
    const Vector z = solve_qp(qp, settings);
    return {qp.block_laplacian(z, 0), qp.block_laplacian(z, 1)};
}

TwoStepResult learn_two_step(const MultidomainData& data, const LearnConfig& cfg_full,
                             const SolverSettings& cfg_factor) {
    cfg_full.validate();
    check_factor_sizes(data.P(), data.Q());
    if (data.T() < 1) throw DimensionError("learning needs at least one snapshot");
    const MultidomainData d = prepared(data, cfg_full.normalize_data);
    const StandardQP full = build_single_qp(d.data(), cfg_full.alpha, cfg_full.beta1);
    const Vector z = solve_qp(full, cfg_full.solver);
    Laplacian Ln = full.block_laplacian(z, 0);
    FactorLaplacians f = factorize_laplacian(Ln, data.P(), data.Q(), cfg_factor);
    return {std::move(f.Lp), std::move(f.Lq), std::move(Ln)};
}

double factor_objective(const MultidomainData& data, const Laplacian& Lp, const Laplacian& Lq,
                        double alpha, double beta1, double beta2) {
    return alpha * smoothness_factored(data, Lp, Lq) + beta1 * Lp.matrix().squaredNorm() +
           beta2 * Lq.matrix().squaredNorm();
}

std::vector<GridPoint> default_grid() {
    std::vector<GridPoint> grid;
    for (double a : {0.01, 0.1, 1.0}) {
        for (double b : {0.1, 0.5, 1.0, 5.0}) grid.push_back({a, b, b});
    }
    return grid;
}

namespace {

double scored(const Laplacian& truth, const Laplacian& est, double threshold, const char* label) {
    if (edge_set(truth.trace_normalized(), threshold).size() == 0) {
        std::clog << "warning: ground-truth " << label
                  << " has no edges; F-measure undefined, scored as 0\n";
        return 0.0;
    }
    return f_measure(truth, est, threshold).f_measure;
}

GridRow evaluate_point(const MultidomainData& data, const GridPoint& pt,
                       const FactorLaplacians& truth, const Laplacian& truth_n,
                       const GridSearchOptions& opts) {
    LearnConfig cfg;
    cfg.alpha = pt.alpha;
    cfg.beta1 = pt.beta1;
    cfg.beta2 = pt.beta2;
    cfg.solver = opts.solver;
    cfg.normalize_data = opts.normalize_data;

    GridRow row;
    row.point = pt;
    const auto start = std::chrono::steady_clock::now();
    Laplacian Lp, Lq, Ln;
    if (opts.method == Method::OneStep) {
        FactorLaplacians f = learn_product_graph(data, cfg);
        Ln = cartesian_sum(f.Lp, f.Lq);
        Lp = std::move(f.Lp);
        Lq = std::move(f.Lq);
    } else {
        TwoStepResult r = learn_two_step(data, cfg, opts.solver);
        Lp = std::move(r.Lp);
        Lq = std::move(r.Lq);
        Ln = std::move(r.Ln_full);
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.f_p = scored(truth.Lp, Lp, opts.threshold, "L_P");
    row.f_q = scored(truth.Lq, Lq, opts.threshold, "L_Q");
    row.f_n = scored(truth_n, Ln, opts.threshold, "L_N");
    row.score = 0.5 * (row.f_p + row.f_q);
    return row;
}

}  // namespace

GridSearchResult grid_search(const MultidomainData& data, const std::vector<GridPoint>& grid,
                             const FactorLaplacians& truth, const GridSearchOptions& opts) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
    if (truth.Lp.n() != data.P() || truth.Lq.n() != data.Q()) {
        throw DimensionError("grid_search: truth sizes do not match data");
    }
    const Laplacian truth_n = cartesian_sum(truth.Lp, truth.Lq);
    GridSearchResult out;
    out.rows.resize(grid.size());

    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(grid.size())));
    if (jobs == 1) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            out.rows[g] = evaluate_point(data, grid[g], truth, truth_n, opts);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(grid.size());
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (std::size_t g; (g = next.fetch_add(1)) < grid.size();) {
                    try {
                        out.rows[g] = evaluate_point(data, grid[g], truth, truth_n, opts);
                    } catch (...) {
                        errors[g] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    for (std::size_t g = 0; g < out.rows.size(); ++g) {
        if (out.rows[g].score > out.rows[out.best_index].score) out.best_index = g;
    }
    out.best = grid[out.best_index];
    return out;
}

}  // namespace pgl

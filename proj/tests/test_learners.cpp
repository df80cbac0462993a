#include <doctest.h>

#include "pgl/error.hpp"
#include "pgl/evaluation.hpp"
#include "pgl/learners.hpp"
#include "pgl/synthetic.hpp"
#include "test_support.hpp"

using namespace pgl;
using namespace pgl::testing;

namespace {

struct Instance {
    FactorLaplacians truth;
    MultidomainData data;
};

Instance small_instance(std::uint64_t seed, Index T = 40) {
    const Laplacian Lp = community_graph({6, 2, 0.8, 0.05, 0.5, 1.5, seed});
    const Laplacian Lq = community_graph({5, 1, 0.7, 0.0, 0.5, 1.5, seed + 50});
    const Laplacian Ln = cartesian_sum(Lp, Lq);
    return {{Lp, Lq}, sample_smooth_signals(Ln, 6, 5, T, 0.05, seed + 100)};
}

LearnConfig pg_config(const LearnConfig& base) {
    LearnConfig c = base;
    c.solver.kind = SolverKind::ProjectedGradient;
    c.solver.pg.tol = 1e-9;
    c.solver.pg.max_iters = 2000000;
    return c;
}

}  // namespace

TEST_CASE("solver names") {
    CHECK(parse_solver_kind("waterfill") == SolverKind::Waterfill);
    CHECK(parse_solver_kind("pg") == SolverKind::ProjectedGradient);
    CHECK(std::string(to_string(SolverKind::ProjectedGradient)) == "pg");
    CHECK_THROWS(parse_solver_kind("cvx"));
}

TEST_CASE("learned factors are valid, trace-normalized Laplacians") {
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const Instance inst = small_instance(s);
        const FactorLaplacians f = learn_product_graph(inst.data, {});
        for (const Laplacian* L : {&f.Lp, &f.Lq}) {
            const auto diag = validate_laplacian(*L, 1e-6);
            CHECK(diag.pass_with_trace());
            CHECK(diag.max_positive_offdiag <= 1e-8);
        }
    }
}

TEST_CASE("constant data: both solvers agree") {
    const MultidomainData d(2, 3, Matrix::Ones(6, 4));
    const LearnConfig cfg;
    const FactorLaplacians a = learn_product_graph(d, cfg);
    const FactorLaplacians b = learn_product_graph(d, pg_config(cfg));
    CHECK((a.Lp.matrix() - b.Lp.matrix()).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((a.Lq.matrix() - b.Lq.matrix()).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("P = Q = 2 has a single feasible point") {
    Rng rng(1);
    const FactorLaplacians f = learn_product_graph(random_dataset(2, 2, 5, rng), {});
    const Matrix K2 = (Matrix(2, 2) << 1, -1, -1, 1).finished();
    CHECK((f.Lp.matrix() - K2).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((f.Lq.matrix() - K2).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("degenerate sizes are rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(learn_product_graph(random_dataset(1, 3, 5, rng), {}), DimensionError);
    LearnConfig bad;
    bad.alpha = 0.0;
    CHECK_THROWS(learn_product_graph(random_dataset(3, 3, 5, rng), bad));
}

TEST_CASE("deterministic") {
    const Instance inst = small_instance(3);
    const FactorLaplacians a = learn_product_graph(inst.data, {});
    const FactorLaplacians b = learn_product_graph(inst.data, {});
    CHECK(a.Lp.matrix() == b.Lp.matrix());
    CHECK(a.Lq.matrix() == b.Lq.matrix());
}

TEST_CASE("normalization makes the result scale invariant") {
    const Instance inst = small_instance(4);
    const MultidomainData scaled(6, 5, inst.data.data() * 37.0);
    const FactorLaplacians a = learn_product_graph(inst.data, {});
    const FactorLaplacians b = learn_product_graph(scaled, {});
    CHECK((a.Lp.matrix() - b.Lp.matrix()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a.Lq.matrix() - b.Lq.matrix()).cwiseAbs().maxCoeff() < 1e-6);

    // Without normalization, scaling the data by c is the same as scaling alpha by c^2.
    LearnConfig raw;
    raw.normalize_data = false;
    LearnConfig raw_alpha = raw;
    raw_alpha.alpha = raw.alpha * 4.0;
    const FactorLaplacians c = learn_product_graph(MultidomainData(6, 5, inst.data.data() * 2.0), raw);
    const FactorLaplacians d = learn_product_graph(inst.data, raw_alpha);
    CHECK((c.Lp.matrix() - d.Lp.matrix()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("water-filling against projected gradient and the truth") {
    for (std::uint64_t s = 1; s <= 4; ++s) {
        const Instance inst = small_instance(s);
        LearnConfig cfg;
        cfg.normalize_data = false;
        const FactorLaplacians wf = learn_product_graph(inst.data, cfg);
        const FactorLaplacians pg = learn_product_graph(inst.data, pg_config(cfg));
        const double o_wf = factor_objective(inst.data, wf.Lp, wf.Lq, cfg.alpha, cfg.beta1, cfg.beta2);
        const double o_pg = factor_objective(inst.data, pg.Lp, pg.Lq, cfg.alpha, cfg.beta1, cfg.beta2);
        CHECK(o_wf <= o_pg + 1e-7 * (1.0 + std::abs(o_pg)));
        const Laplacian tp = inst.truth.Lp.trace_normalized(), tq = inst.truth.Lq.trace_normalized();
        CHECK(o_wf <= factor_objective(inst.data, tp, tq, cfg.alpha, cfg.beta1, cfg.beta2) + 1e-9);
    }
}

TEST_CASE("zero beta falls back to projected gradient") {
    const Instance inst = small_instance(2, 10);
    LearnConfig cfg;
    cfg.beta1 = 0.0;
    cfg.solver.pg.max_iters = 500000;
    cfg.solver.pg.tol = 1e-6;
    SolveReport rep;
    const FactorLaplacians f = learn_product_graph(inst.data, cfg, &rep);
    CHECK(rep.fell_back);
    CHECK(rep.used == SolverKind::ProjectedGradient);
    CHECK(validate_laplacian(f.Lp, 1e-5).pass_with_trace());
}

TEST_CASE("budget exhaustion surfaces as NotConverged") {
    const Instance inst = small_instance(2);
    LearnConfig cfg;
    cfg.solver.waterfill.max_sweeps = 1;
    try {
        learn_product_graph(inst.data, cfg);
        FAIL("expected NotConverged");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverFailure::NotConverged);
    }
}

TEST_CASE("factorizing an exact Kronecker sum recovers the factors") {
    Rng rng(9);
    for (int t = 0; t < 10; ++t) {
        const Index P = 2 + t % 4, Q = 2 + (t * 3) % 4;
        const Laplacian Lp = random_trace_laplacian(P, rng), Lq = random_trace_laplacian(Q, rng);
        const Laplacian Ln = cartesian_sum(Lp, Lq);
        const FactorLaplacians f = factorize_laplacian(Ln, P, Q, {});
        CHECK((f.Lp.matrix() - Lp.matrix()).cwiseAbs().maxCoeff() < 1e-5);
        CHECK((f.Lq.matrix() - Lq.matrix()).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("two-step pipeline returns valid Laplacians") {
    const Instance inst = small_instance(1);
    const TwoStepResult r = learn_two_step(inst.data, {}, {});
    CHECK(r.Ln_full.n() == 30);
    CHECK(validate_laplacian(r.Ln_full, 1e-6).pass_with_trace());
    CHECK(validate_laplacian(r.Lp, 1e-6).pass_with_trace());
    CHECK(validate_laplacian(r.Lq, 1e-6).pass_with_trace());
}

TEST_CASE("grid search") {
    const Instance inst = small_instance(5);
    const auto grid = default_grid();
    CHECK(grid.size() == 12);

    GridSearchOptions opts;
    const GridSearchResult serial = grid_search(inst.data, grid, inst.truth, opts);
    CHECK(serial.rows.size() == 12);
    for (const auto& row : serial.rows) CHECK(row.score <= serial.rows[serial.best_index].score);
    for (std::size_t g = 0; g < serial.best_index; ++g) {
        CHECK(serial.rows[g].score < serial.rows[serial.best_index].score);
    }

    opts.jobs = 3;
    const GridSearchResult parallel = grid_search(inst.data, grid, inst.truth, opts);
    CHECK(parallel.best_index == serial.best_index);
    for (std::size_t g = 0; g < grid.size(); ++g) CHECK(parallel.rows[g].score == serial.rows[g].score);

    // Single point: that point is best.
    const GridSearchResult one = grid_search(inst.data, {grid[4]}, inst.truth, {});
    CHECK(one.best_index == 0);
    CHECK(one.best.alpha == grid[4].alpha);

    // Repeated points tie; the first wins.
    const GridSearchResult tie = grid_search(inst.data, {grid[2], grid[2]}, inst.truth, {});
    CHECK(tie.best_index == 0);

    // Empty truth scores zero instead of failing.
    const FactorLaplacians empty{Laplacian::zero(6), inst.truth.Lq};
    const GridSearchResult e = grid_search(inst.data, {grid[0]}, empty, {});
    CHECK(e.rows[0].f_p == 0.0);

    CHECK_THROWS(grid_search(inst.data, {}, inst.truth, {}));
}

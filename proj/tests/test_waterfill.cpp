#include <doctest.h>

#include "pgl/error.hpp"
#include "pgl/generic_qp.hpp"
#include "pgl/waterfill.hpp"
#include "test_support.hpp"

using namespace pgl;
using namespace pgl::testing;

namespace {

StandardQP simplex_qp() {
    StandardQP qp;
    qp.hess_diag = Vector::Ones(3);
    qp.q = (Vector(3) << 0, -1, -2).finished();
    qp.C = Matrix::Ones(1, 3);
    qp.b = Vector::Constant(1, 3.0);
    return qp;
}

StandardQP random_factor_qp(Rng& rng, Index P, Index Q) {
    const MultidomainData d = random_dataset(P, Q, 1 + static_cast<Index>(rng.uniform() * 8), rng);
    return build_factor_qp(d, rng.uniform(0.05, 2.0), rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0));
}

}  // namespace

TEST_CASE("single row example") {
    const WaterfillResult res = solve_waterfill(simplex_qp());
    CHECK(res.converged);
    CHECK((res.z - Vector((Vector(3) << 0, 1, 2).finished())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(res.mu[0]) < 1e-12);
}

TEST_CASE("doubling b doubles the level when q = 0") {
    StandardQP qp = simplex_qp();
    qp.q.setZero();
    const double mu1 = solve_waterfill(qp).mu[0];
    qp.b *= 2.0;
    const double mu2 = solve_waterfill(qp).mu[0];
    CHECK(mu2 == doctest::Approx(2.0 * mu1).epsilon(1e-12));
}

TEST_CASE("two-node graph QP") {
    Vector x(2);
    x << 1, -1;
    const StandardQP qp = build_single_qp(x, 1.0, 1.0);
    const WaterfillResult res = solve_waterfill(qp);
    CHECK(res.converged);
    CHECK((res.z - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("failure modes") {
    StandardQP qp;
    qp.hess_diag = Vector::Ones(2);
    qp.q = Vector::Zero(2);
    qp.C = (Matrix(1, 2) << -1, -1).finished();
    qp.b = Vector::Constant(1, 5.0);
    try {
        solve_waterfill(qp);
        FAIL("expected UnboundedLevel");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverFailure::UnboundedLevel);
    }

    StandardQP flat = simplex_qp();
    flat.hess_diag[1] = 0.0;
    try {
        solve_waterfill(flat);
        FAIL("expected ZeroCurvature");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverFailure::ZeroCurvature);
    }

    WaterfillOptions bad;
    bad.damping = 0.0;
    CHECK_THROWS(solve_waterfill(simplex_qp(), bad));
}

TEST_CASE("budget exhaustion is reported, not thrown") {
    Rng rng(4);
    const StandardQP qp = random_factor_qp(rng, 6, 5);
    WaterfillOptions opts;
    opts.max_sweeps = 1;
    const WaterfillResult res = solve_waterfill(qp, opts);
    CHECK(res.sweeps_used == 1);
    CHECK_FALSE(res.converged);
}

TEST_CASE("solve_level picks the plateau point nearest the current level") {
    // f(m) = max(0, m) is 0 on (-inf, 0]; target 0 is met anywhere there.
    const std::vector<double> c{1.0}, r{0.0}, h{1.0};
    CHECK(solve_level(c, r, h, 0.0, -3.0) == -3.0);
    CHECK(solve_level(c, r, h, 0.0, 2.0) == 0.0);
    CHECK(solve_level(c, r, h, 2.0, -3.0) == 2.0);
    // Plateau between two breakpoints: f(m) = max(0, m) + max(0, m - 2) - max(0, m - 1)
    // cannot be built from one row, but max(0, m) + max(0, m - 2) with target 0
    // still has the plateau (-inf, 0] and grows with slope 2 past m = 2.
    const std::vector<double> c3{1.0, 1.0}, r3{0.0, -2.0}, h3{1.0, 1.0};
    CHECK(solve_level(c3, r3, h3, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(solve_level(c3, r3, h3, 4.0, 0.0) == doctest::Approx(3.0));
    // Opposite signs: f(m) = max(0, m) - max(0, 1 - m) is strictly increasing.
    const std::vector<double> c2{1.0, -1.0}, r2{0.0, 1.0}, h2{1.0, 1.0};
    CHECK(solve_level(c2, r2, h2, 1.0, 5.0) == doctest::Approx(1.0));
    CHECK(solve_level(c2, r2, h2, 0.5, 0.0) == doctest::Approx(0.75));
    CHECK(solve_level(c2, r2, h2, -3.0, 0.0) == doctest::Approx(-2.0));
    // f(m) = -max(0, -m) <= 0 never reaches 1.
    const std::vector<double> c4{-1.0}, r4{0.0}, h4{1.0};
    CHECK_THROWS_AS(solve_level(c4, r4, h4, 1.0, 0.0), SolverError);
}

TEST_CASE("scalar level solves its row with the others held") {
    Rng rng(6);
    const StandardQP qp = random_factor_qp(rng, 4, 3);
    Vector mu(qp.M());
    for (Index i = 0; i < mu.size(); ++i) mu[i] = rng.normal();
    for (Index row = 0; row < qp.M(); ++row) {
        Vector m = mu;
        m[row] = scalar_water_level(row, qp, mu);
        const Vector z = primal_from_multipliers(qp, m);
        CHECK(std::abs(qp.C.row(row).dot(z) - qp.b[row]) < 1e-9);
    }
}

TEST_CASE("agrees with projected gradient on random factor QPs") {
    Rng rng(2025);
    for (int t = 0; t < 20; ++t) {
        const Index P = 2 + t % 5, Q = 2 + (t * 3) % 5;
        const StandardQP qp = random_factor_qp(rng, P, Q);
        const WaterfillResult wf = solve_waterfill(qp);
        REQUIRE(wf.converged);
        PGOptions po;
        po.tol = 1e-10;
        po.max_iters = 1000000;
        const PGResult pg = solve_projected_gradient(qp, po);
        CHECK((wf.z - pg.z).cwiseAbs().maxCoeff() < 1e-5);
        CHECK(wf.kkt_residual <= 1e-6);
        CHECK(qp.objective(wf.z) <= qp.objective(pg.z) + 1e-7 * (1.0 + std::abs(qp.objective(pg.z))));
        CHECK((wf.z.array() >= 0.0).all());
    }
}

TEST_CASE("KKT structure and scale invariance of the primal") {
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
        StandardQP qp = random_factor_qp(rng, 2 + t % 4, 2 + t % 3);
        const WaterfillResult res = solve_waterfill(qp);
        REQUIRE(res.converged);
        const Vector lambda = (qp.hess_diag.array() * res.z.array()).matrix() + qp.q -
                              qp.C.transpose() * res.mu;
        for (Index i = 0; i < qp.K(); ++i) {
            CHECK(lambda[i] >= -1e-8);
            CHECK(std::abs(res.z[i] * lambda[i]) <= 1e-8);
        }
        // Scaling H and q together leaves z unchanged and scales mu.
        StandardQP scaled = qp;
        scaled.hess_diag *= 3.0;
        scaled.q *= 3.0;
        const WaterfillResult s = solve_waterfill(scaled);
        CHECK((s.z - res.z).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("dual objective never decreases across sweeps") {
    Rng rng(12);
    for (int t = 0; t < 10; ++t) {
        const StandardQP qp = random_factor_qp(rng, 5 + t % 3, 4 + t % 4);
        WaterfillOptions opts;
        opts.record_trace = true;
        const WaterfillResult res = solve_waterfill(qp, opts);
        REQUIRE(res.trace.size() == static_cast<std::size_t>(res.sweeps_used));
        double prev = dual_objective(qp, Vector::Zero(qp.M()));
        for (const auto& row : res.trace) {
            CHECK(row.dual_objective >= prev - 1e-9 * (1.0 + std::abs(prev)));
            prev = row.dual_objective;
        }
        // Weak duality at the end.
        CHECK(res.trace.back().dual_objective <= qp.objective(res.z) + 1e-7);
    }
}

TEST_CASE("damping still converges to the same point") {
    Rng rng(13);
    const StandardQP qp = random_factor_qp(rng, 5, 4);
    WaterfillOptions opts;
    opts.damping = 0.6;
    const WaterfillResult damped = solve_waterfill(qp, opts);
    const WaterfillResult full = solve_waterfill(qp);
    CHECK(damped.converged);
    CHECK((damped.z - full.z).cwiseAbs().maxCoeff() < 1e-7);
}

#include <cmath>

#include <doctest.h>

#include "pgl/error.hpp"
#include "pgl/synthetic.hpp"
#include "test_support.hpp"

using namespace pgl;

TEST_CASE("community_of splits into contiguous blocks") {
    CHECK(community_of(0, 10, 2) == 0);
    CHECK(community_of(4, 10, 2) == 0);
    CHECK(community_of(5, 10, 2) == 1);
    CHECK(community_of(14, 15, 3) == 2);
    CHECK(community_of(3, 4, 1) == 0);
}

TEST_CASE("community graphs are deterministic and connected") {
    CommunityGraphConfig cfg;
    cfg.seed = 42;
    const Laplacian a = community_graph(cfg);
    const Laplacian b = community_graph(cfg);
    CHECK(a.matrix() == b.matrix());
    CHECK(is_connected(a));
    CHECK(validate_laplacian(a, 1e-12).pass);

    cfg.seed = 43;
    CHECK_FALSE(community_graph(cfg).matrix() == a.matrix());
}

TEST_CASE("weights stay in range and outside edges follow p_out") {
    CommunityGraphConfig cfg{10, 2, 1.0, 0.0, 0.5, 1.5, 1};
    cfg.p_out = 0.05;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        cfg.seed = s;
        const Laplacian L = community_graph(cfg);
        for (Index i = 0; i < 10; ++i) {
            for (Index j = 0; j < i; ++j) {
                const double w = -L(i, j);
                if (community_of(i, 10, 2) == community_of(j, 10, 2)) {
                    CHECK(w >= 0.5);
                    CHECK(w < 1.5);
                } else {
                    CHECK((w == 0.0 || (w >= 0.5 && w < 1.5)));
                }
            }
        }
    }
}

TEST_CASE("community graph edge cases") {
    const Laplacian pair = community_graph({2, 1, 1.0, 0.0, 0.5, 1.5, 9});
    CHECK(edge_set(pair, 0.0).size() == 1);
    CHECK(-pair(0, 1) >= 0.5);
    CHECK(-pair(0, 1) < 1.5);

    // Two cliques that can never be joined.
    CHECK_THROWS_AS(community_graph({4, 2, 1.0, 0.0, 0.5, 1.5, 1}), DataError);
    CHECK_THROWS(community_graph({4, 5, 0.5, 0.1, 0.5, 1.5, 1}));
    CHECK_THROWS(community_graph({4, 2, 1.5, 0.1, 0.5, 1.5, 1}));
    CHECK_THROWS(community_graph({4, 2, 0.5, 0.1, 1.5, 0.5, 1}));
}

TEST_CASE("smooth signals on two nodes") {
    Matrix K(2, 2);
    K << 1, -1, -1, 1;
    const Laplacian L(K);
    // With sigma = 0, x lies in span{(1, -1)}: components sum to zero ...
    const MultidomainData d = sample_smooth_signals(L, 2, 1, 2000, 0.0, 5);
    CHECK((d.data().row(0) + d.data().row(1)).cwiseAbs().maxCoeff() < 1e-12);
    // ... and x0 - x1 = sqrt(2) h with var(h) = 1 / lambda = 1/2.
    const double var = (d.data().row(0) - d.data().row(1)).squaredNorm() / d.T();
    CHECK(var == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("smooth components avoid the null space") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        CommunityGraphConfig cp{5, 1, 0.8, 0.0, 0.5, 1.5, std::uint64_t(trial + 1)};
        CommunityGraphConfig cq{4, 1, 0.8, 0.0, 0.5, 1.5, std::uint64_t(trial + 100)};
        const Laplacian Ln = cartesian_sum(community_graph(cp), community_graph(cq));
        const MultidomainData d = sample_smooth_signals(Ln, 5, 4, 20, 0.0, trial);
        const Vector ones_proj = d.data().colwise().sum().transpose() / std::sqrt(20.0);
        CHECK(ones_proj.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("expected quadratic form equals the rank") {
    const Laplacian Lp = community_graph({10, 2, 0.7, 0.05, 0.5, 1.5, 3});
    const Laplacian Lq = community_graph({15, 3, 0.7, 0.05, 0.5, 1.5, 4});
    const Laplacian Ln = cartesian_sum(Lp, Lq);
    const MultidomainData d = sample_smooth_signals(Ln, 10, 15, 400, 0.0, 11);
    const double mean_q = smoothness_full(d, Ln) / d.T();
    CHECK(mean_q == doctest::Approx(149.0).epsilon(0.1));
}

TEST_CASE("smooth signals are smoother than white noise") {
    int smoother = 0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
        const Laplacian Lp = community_graph({6, 2, 0.8, 0.1, 0.5, 1.5, s});
        const Laplacian Lq = community_graph({5, 1, 0.8, 0.0, 0.5, 1.5, s + 1000});
        const Laplacian Ln = cartesian_sum(Lp, Lq);
        const MultidomainData d = sample_smooth_signals(Ln, 6, 5, 20, 0.0, s);
        Rng rng(s);
        Matrix white = pgl::testing::random_matrix(30, 20, rng);
        white *= std::sqrt(d.data().squaredNorm() / white.squaredNorm());
        const double ratio_smooth = smoothness_full(d, Ln) / d.data().squaredNorm();
        const double ratio_white = smoothness_full(MultidomainData(6, 5, white), Ln) / white.squaredNorm();
        smoother += ratio_smooth < ratio_white ? 1 : 0;
    }
    CHECK(smoother >= 95);
}

TEST_CASE("sampler determinism and errors") {
    const Laplacian L = community_graph({6, 2, 0.8, 0.1, 0.5, 1.5, 2});
    const auto a = sample_smooth_signals(L, 3, 2, 5, 0.1, 77);
    const auto b = sample_smooth_signals(L, 3, 2, 5, 0.1, 77);
    CHECK(a.data() == b.data());
    CHECK_THROWS_AS(sample_smooth_signals(L, 4, 2, 5, 0.1, 1), DimensionError);
    Matrix asym = L.matrix();
    asym(0, 1) += 0.3;
    CHECK_THROWS_AS(sample_smooth_signals(Laplacian(asym), 3, 2, 5, 0.1, 1), DataError);
    CHECK(smooth_component_sd(Laplacian::zero(3)) == 0.0);
}

TEST_CASE("masks") {
    Rng rng(1);
    const MultidomainData d = pgl::testing::random_dataset(10, 15, 50, rng);
    const MaskedData none = apply_mask(d, 0.0, 0.0, 3);
    CHECK(none.Y == d.data());
    CHECK(none.mask == Matrix::Ones(150, 50));

    const double f = 0.2;
    const MaskedData m = apply_mask(d, f, 0.0, 3);
    const double total = 150.0 * 50.0;
    const double hidden = total - m.observed_count();
    const double sd = std::sqrt(total * f * (1 - f));
    CHECK(std::abs(hidden - total * f) <= 2.576 * sd);
    for (Index k = 0; k < m.Y.size(); ++k) {
        if (m.mask.data()[k] == 1.0) CHECK(m.Y.data()[k] == d.data().data()[k]);
        else CHECK(m.Y.data()[k] == 0.0);
    }
    CHECK(apply_mask(d, f, 0.0, 3).mask == m.mask);
    CHECK_THROWS(apply_mask(d, 1.5, 0.0, 3));
}

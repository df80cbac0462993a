#include "pgl/synthetic.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "pgl/error.hpp"
#include "pgl/rng.hpp"

namespace pgl {

void CommunityGraphConfig::validate() const {
    if (n < 1) throw std::invalid_argument("community graph: n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("community graph: need 1 <= k <= n");
    if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0)) {
        throw std::invalid_argument("community graph: need 0 <= p_out <= p_in <= 1");
    }
    if (!(0.0 < weight_low && weight_low <= weight_high)) {
        throw std::invalid_argument("community graph: need 0 < weight_low <= weight_high");
    }
}

Index community_of(Index v, Index n, Index k) { return v * k / n; }

Laplacian community_graph(const CommunityGraphConfig& cfg) {
    cfg.validate();
    const Index n = cfg.n;
    for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
        Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(attempt)));
        EdgeWeights w{n, Vector::Zero(EdgeWeights::expected_length(n))};
        Index k = 0;
        for (Index j = 0; j < n; ++j) {
            for (Index i = j + 1; i < n; ++i, ++k) {
                const bool same = community_of(i, n, cfg.k) == community_of(j, n, cfg.k);
                // Always consume both draws so the weight stream does not
                // depend on which pairs became edges.
                const bool edge = rng.bernoulli(same ? cfg.p_in : cfg.p_out);
                const double weight = rng.uniform(cfg.weight_low, cfg.weight_high);
                if (edge) w.w[k] = weight;
            }
        }
        Laplacian L = laplacian_from_weights(w);
        if (is_connected(L)) return L;
    }
    throw DataError("community graph: no connected graph after " +
                    std::to_string(kMaxRegenerations) + " attempts (n=" + std::to_string(n) +
                    ", k=" + std::to_string(cfg.k) + ")");
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eigen_of(const Laplacian& L) {
    if ((L.matrix() - L.matrix().transpose()).cwiseAbs().maxCoeff() != 0.0) {
        throw DataError("Laplacian is not symmetric");
    }
    return Eigen::SelfAdjointEigenSolver<Matrix>(L.matrix());
}

}  // namespace

MultidomainData sample_smooth_signals(const Laplacian& Ln, Index P, Index Q, Index T, double sigma,
                                      std::uint64_t seed) {
    if (Ln.n() != P * Q) throw DimensionError("Laplacian size must equal P*Q");
    if (T < 1) throw std::invalid_argument("sample_smooth_signals: T must be >= 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sample_smooth_signals: sigma must be >= 0");
    const Index N = P * Q;
    Vector scale = Vector::Zero(N);
    Matrix V;
    if (N > 0) {
        const auto eig = eigen_of(Ln);
        V = eig.eigenvectors();
        for (Index j = 0; j < N; ++j) {
            const double lambda = eig.eigenvalues()[j];
            if (lambda > kEigenCutoff) scale[j] = 1.0 / std::sqrt(lambda);
        }
    }
    Rng rng(seed);
    Matrix X(N, T);
    Vector h(N);
    for (Index t = 0; t < T; ++t) {
        for (Index j = 0; j < N; ++j) h[j] = scale[j] * rng.normal();
        X.col(t) = V * h;
        for (Index i = 0; i < N; ++i) X(i, t) += sigma * rng.normal();
    }
    return MultidomainData(P, Q, std::move(X));
}

double smooth_component_sd(const Laplacian& Ln) {
    if (Ln.n() == 0) return 0.0;
    const auto eig = eigen_of(Ln);
    double tr = 0.0;
    for (Index j = 0; j < Ln.n(); ++j) {
        const double lambda = eig.eigenvalues()[j];
        if (lambda > kEigenCutoff) tr += 1.0 / lambda;
    }
    return std::sqrt(tr / static_cast<double>(Ln.n()));
}

MaskedData apply_mask(const MultidomainData& data, double missing_fraction, double sigma_noise,
                      std::uint64_t seed) {
    if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
        throw std::invalid_argument("apply_mask: missing fraction must lie in [0, 1)");
    }
    if (!(sigma_noise >= 0.0)) throw std::invalid_argument("apply_mask: noise sd must be >= 0");
    MaskedData out{data.P(), data.Q(), data.data(), Matrix::Ones(data.N(), data.T())};
    Rng rng(seed);
    for (Index t = 0; t < data.T(); ++t) {
        for (Index i = 0; i < data.N(); ++i) {
            const bool hidden = rng.bernoulli(missing_fraction);
            const double noise = rng.normal();
            if (hidden) {
                out.mask(i, t) = 0.0;
                out.Y(i, t) = 0.0;
            } else {
                out.Y(i, t) += sigma_noise * noise;
            }
        }
    }
    return out;
}

}  // namespace pgl

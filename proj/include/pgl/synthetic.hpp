#pragma once

// Synthetic product-graph experiments: community factor graphs, smooth
// signals drawn from the factor-analysis model, and random observation masks.

#include <cstdint>

#include "pgl/graph.hpp"
#include "pgl/signal.hpp"

namespace pgl {

struct CommunityGraphConfig {
    Index n = 10;
    Index k = 2;
    double p_in = 0.7;
    double p_out = 0.05;
    double weight_low = 0.5;
    double weight_high = 1.5;
    std::uint64_t seed = 1;

    void validate() const;
};

inline constexpr int kMaxRegenerations = 1000;
inline constexpr double kEigenCutoff = 1e-9;

/// Contiguous near-equal communities; node v belongs to community v*k/n.
Index community_of(Index v, Index n, Index k);

/// Random community graph, redrawn from a fresh substream until connected.
/// Throws DataError after kMaxRegenerations failed attempts.
Laplacian community_graph(const CommunityGraphConfig& cfg);

/// x = V h + sigma g with L_N = V diag(lambda) V^T, h_j ~ N(0, 1/lambda_j) on
/// the non-null eigenvalues (lambda_j > kEigenCutoff) and g standard normal.
MultidomainData sample_smooth_signals(const Laplacian& Ln, Index P, Index Q, Index T, double sigma,
                                      std::uint64_t seed);

/// sqrt(tr(L^+) / n): per-node standard deviation of the smooth component.
double smooth_component_sd(const Laplacian& Ln);

/// Hide each entry independently with probability missing_fraction and add
/// N(0, sigma_noise^2) to the observed ones.
MaskedData apply_mask(const MultidomainData& data, double missing_fraction, double sigma_noise,
                      std::uint64_t seed);

}  // namespace pgl

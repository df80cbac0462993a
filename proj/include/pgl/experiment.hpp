#pragma once

// Synthetic product-graph experiment: generate community factor graphs and
// smooth data, grid-search both learners, and tabulate edge-recovery scores.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgl/learners.hpp"
#include "pgl/synthetic.hpp"

namespace pgl {

struct ExperimentManifest {
    std::uint64_t seed = 1;
    CommunityGraphConfig graph_p{10, 2, 0.7, 0.05, 0.5, 1.5, 0};
    CommunityGraphConfig graph_q{15, 3, 0.7, 0.05, 0.5, 1.5, 0};
    Index T = 50;
    /// Additive noise sd; negative selects 0.1 x smooth_component_sd(L_N).
    double sigma = -1.0;
    /// Fraction of entries hidden when a mask is requested (0 = no mask).
    double missing_fraction = 0.0;
    double mask_noise = 0.0;
    std::vector<GridPoint> grid = default_grid();
    std::filesystem::path output_dir = "out";

    void validate() const;
    nlohmann::json to_json() const;
    static ExperimentManifest from_json(const nlohmann::json& j);
};

struct SyntheticInstance {
    std::uint64_t seed = 0;
    FactorLaplacians truth;
    Laplacian Ln;
    MultidomainData data;
    double sigma = 0.0;
    bool has_mask = false;
    MaskedData masked;
};

/// Deterministic in (manifest, seed): the factor graphs, signals and mask use
/// separate substreams derived from `seed`.
SyntheticInstance generate_instance(const ExperimentManifest& manifest, std::uint64_t seed);

/// Writes lp_true.csv, lq_true.csv, data.csv, data.json (sidecar with every
/// parameter and the seed) and, with a mask, mask.csv and observed.csv.
void write_instance(const std::filesystem::path& dir, const ExperimentManifest& manifest,
                    const SyntheticInstance& inst);

struct SeedOutcome {
    std::uint64_t seed = 0;
    GridSearchResult one_step;
    GridSearchResult two_step;
    double seconds_one_step = 0.0;  // whole grid
    double seconds_two_step = 0.0;
};

struct ColumnStats {
    double mean = 0.0;
    double sd = 0.0;
};

struct Table1Summary {
    // [method][column], method 0 = one-step, 1 = two-step; column 0..2 = L_P, L_Q, L_N.
    ColumnStats stats[2][3];
};

struct Table1Result {
    std::vector<SeedOutcome> seeds;
    Table1Summary summary;
};

struct Table1Options {
    std::vector<std::uint64_t> seeds;
    SolverSettings solver;
    double threshold = kDefaultEdgeThreshold;
    unsigned jobs = 1;
    bool verbose = false;
};

/// Seeds 1..n.
std::vector<std::uint64_t> default_seeds(std::size_t n = 10);

Table1Result run_table1(const ExperimentManifest& manifest, const Table1Options& opts);

Table1Summary summarize(const std::vector<SeedOutcome>& seeds);

/// Per (seed, grid point) CSV: seed, alpha, beta1, beta2 and F-measures of both methods.
void write_per_seed_csv(const std::filesystem::path& path, const Table1Result& result);

/// Table layout: rows = method, columns = L_P, L_Q, L_N ("mean ± sd").
std::string format_table(const Table1Summary& summary, bool markdown);

}  // namespace pgl

#include "pgl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "pgl/error.hpp"
#include "pgl/io.hpp"
#include "pgl/rng.hpp"

namespace pgl {

namespace {

enum Stream : std::uint64_t { kGraphP = 1, kGraphQ = 2, kSignals = 3, kMask = 4 };

nlohmann::json graph_json(const CommunityGraphConfig& g) {
    return {{"n", g.n}, {"k", g.k}, {"p_in", g.p_in}, {"p_out", g.p_out},
            {"weight_low", g.weight_low}, {"weight_high", g.weight_high}};
}

CommunityGraphConfig graph_from(const nlohmann::json& j, CommunityGraphConfig g) {
    g.n = j.value("n", g.n);
    g.k = j.value("k", g.k);
    g.p_in = j.value("p_in", g.p_in);
    g.p_out = j.value("p_out", g.p_out);
    g.weight_low = j.value("weight_low", g.weight_low);
    g.weight_high = j.value("weight_high", g.weight_high);
    return g;
}

}  // namespace

void ExperimentManifest::validate() const {
    CommunityGraphConfig p = graph_p, q = graph_q;
    p.validate();
    q.validate();
    if (T < 1) throw std::invalid_argument("manifest: T must be >= 1");
    if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
        throw std::invalid_argument("manifest: missing_fraction must lie in [0, 1)");
    }
    if (!(mask_noise >= 0.0)) throw std::invalid_argument("manifest: mask_noise must be >= 0");
    if (grid.empty()) throw std::invalid_argument("manifest: empty learning grid");
}

nlohmann::json ExperimentManifest::to_json() const {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& pt : grid) g.push_back({pt.alpha, pt.beta1, pt.beta2});
    return {{"seed", seed},
            {"graph_p", graph_json(graph_p)},
            {"graph_q", graph_json(graph_q)},
            {"T", T},
            {"sigma", sigma},
            {"missing_fraction", missing_fraction},
            {"mask_noise", mask_noise},
            {"grid", g},
            {"output_dir", output_dir.string()}};
}

ExperimentManifest ExperimentManifest::from_json(const nlohmann::json& j) {
    ExperimentManifest m;
    try {
        m.seed = j.value("seed", m.seed);
        if (j.contains("graph_p")) m.graph_p = graph_from(j.at("graph_p"), m.graph_p);
        if (j.contains("graph_q")) m.graph_q = graph_from(j.at("graph_q"), m.graph_q);
        m.T = j.value("T", m.T);
        m.sigma = j.value("sigma", m.sigma);
        m.missing_fraction = j.value("missing_fraction", m.missing_fraction);
        m.mask_noise = j.value("mask_noise", m.mask_noise);
        if (j.contains("grid")) {
            m.grid.clear();
            for (const auto& pt : j.at("grid")) {
                m.grid.push_back({pt.at(0).get<double>(), pt.at(1).get<double>(), pt.at(2).get<double>()});
            }
        }
        if (j.contains("output_dir")) m.output_dir = j.at("output_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("manifest: ") + e.what());
    }
    return m;
}

SyntheticInstance generate_instance(const ExperimentManifest& manifest, std::uint64_t seed) {
    manifest.validate();
    SyntheticInstance inst;
    inst.seed = seed;
    CommunityGraphConfig gp = manifest.graph_p;
    CommunityGraphConfig gq = manifest.graph_q;
    gp.seed = Rng::derive(seed, kGraphP);
    gq.seed = Rng::derive(seed, kGraphQ);
    inst.truth.Lp = community_graph(gp);
    inst.truth.Lq = community_graph(gq);
    inst.Ln = cartesian_sum(inst.truth.Lp, inst.truth.Lq);
    if (manifest.sigma >= 0.0) {
        inst.sigma = manifest.sigma;
    } else {
        const double sd = smooth_component_sd(inst.Ln);
        inst.sigma = sd > 0.0 ? 0.1 * sd : 0.1;
    }
    inst.data = sample_smooth_signals(inst.Ln, gp.n, gq.n, manifest.T, inst.sigma,
                                      Rng::derive(seed, kSignals));
    if (manifest.missing_fraction > 0.0 || manifest.mask_noise > 0.0) {
        inst.has_mask = true;
        inst.masked = apply_mask(inst.data, manifest.missing_fraction, manifest.mask_noise,
                                 Rng::derive(seed, kMask));
    }
    return inst;
}

void write_instance(const std::filesystem::path& dir, const ExperimentManifest& manifest,
                    const SyntheticInstance& inst) {
    std::filesystem::create_directories(dir);
    io::save_matrix(dir / "lp_true.csv", inst.truth.Lp.matrix());
    io::save_matrix(dir / "lq_true.csv", inst.truth.Lq.matrix());
    io::save_matrix(dir / "data.csv", inst.data.data());
    nlohmann::json side = manifest.to_json();
    // Outputs depend only on the parameters, not on where they were written.
    side.erase("output_dir");
    side["seed"] = inst.seed;
    side["P"] = inst.data.P();
    side["Q"] = inst.data.Q();
    side["N"] = inst.data.N();
    side["sigma_effective"] = inst.sigma;
    side["has_mask"] = inst.has_mask;
    if (inst.has_mask) {
        io::save_matrix(dir / "mask.csv", inst.masked.mask);
        io::save_matrix(dir / "observed.csv", inst.masked.Y);
        nlohmann::json obs = {{"P", inst.data.P()}, {"Q", inst.data.Q()}, {"seed", inst.seed}};
        io::save_json(dir / "observed.json", obs);
    }
    io::save_json(dir / "data.json", side);
}

std::vector<std::uint64_t> default_seeds(std::size_t n) {
    std::vector<std::uint64_t> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = i + 1;
    return s;
}

Table1Summary summarize(const std::vector<SeedOutcome>& seeds) {
    Table1Summary out;
    if (seeds.empty()) return out;
    for (int m = 0; m < 2; ++m) {
        for (int c = 0; c < 3; ++c) {
            std::vector<double> v;
            for (const auto& s : seeds) {
                const GridSearchResult& g = m == 0 ? s.one_step : s.two_step;
                const GridRow& row = g.rows[g.best_index];
                v.push_back(c == 0 ? row.f_p : c == 1 ? row.f_q : row.f_n);
            }
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
            out.stats[m][c] = {mean, sd};
        }
    }
    return out;
}

Table1Result run_table1(const ExperimentManifest& manifest, const Table1Options& opts) {
    Table1Result out;
    GridSearchOptions gs;
    gs.solver = opts.solver;
    gs.threshold = opts.threshold;
    gs.jobs = opts.jobs;
    for (std::uint64_t seed : opts.seeds) {
        const SyntheticInstance inst = generate_instance(manifest, seed);
        SeedOutcome so;
        so.seed = seed;
        auto t0 = std::chrono::steady_clock::now();
        gs.method = Method::OneStep;
        so.one_step = grid_search(inst.data, manifest.grid, inst.truth, gs);
        auto t1 = std::chrono::steady_clock::now();
        gs.method = Method::TwoStep;
        so.two_step = grid_search(inst.data, manifest.grid, inst.truth, gs);
        auto t2 = std::chrono::steady_clock::now();
        so.seconds_one_step = std::chrono::duration<double>(t1 - t0).count();
        so.seconds_two_step = std::chrono::duration<double>(t2 - t1).count();
        if (opts.verbose) {
            const auto& a = so.one_step.rows[so.one_step.best_index];
            const auto& b = so.two_step.rows[so.two_step.best_index];
            std::cout << "seed " << seed << ": one-step F = " << a.f_p << " / " << a.f_q << " / " << a.f_n
                      << " (" << so.seconds_one_step << " s), two-step F = " << b.f_p << " / " << b.f_q
                      << " / " << b.f_n << " (" << so.seconds_two_step << " s)\n";
        }
        out.seeds.push_back(std::move(so));
    }
    out.summary = summarize(out.seeds);
    return out;
}

void write_per_seed_csv(const std::filesystem::path& path, const Table1Result& result) {
    io::atomic_write(path, [&](std::ostream& out) {
        out << "seed,alpha,beta1,beta2,one_step_f_p,one_step_f_q,one_step_f_n,one_step_seconds,"
               "two_step_f_p,two_step_f_q,two_step_f_n,two_step_seconds\n";
        for (const auto& s : result.seeds) {
            for (std::size_t g = 0; g < s.one_step.rows.size(); ++g) {
                const GridRow& a = s.one_step.rows[g];
                const GridRow& b = s.two_step.rows[g];
                out << s.seed << ',' << io::format_double(a.point.alpha) << ','
                    << io::format_double(a.point.beta1) << ',' << io::format_double(a.point.beta2) << ','
                    << io::format_double(a.f_p) << ',' << io::format_double(a.f_q) << ','
                    << io::format_double(a.f_n) << ',' << io::format_double(a.seconds) << ','
                    << io::format_double(b.f_p) << ',' << io::format_double(b.f_q) << ','
                    << io::format_double(b.f_n) << ',' << io::format_double(b.seconds) << '\n';
            }
        }
    });
}

std::string format_table(const Table1Summary& summary, bool markdown) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    const char* names[2] = {"Solver 1 (one-step)", "Solver 2 (two-step)"};
    if (markdown) {
        out << "| Method | L_P | L_Q | L_N |\n|---|---|---|---|\n";
        for (int m = 0; m < 2; ++m) {
            out << "| " << names[m];
            for (int c = 0; c < 3; ++c) {
                out << " | " << summary.stats[m][c].mean << " ± " << summary.stats[m][c].sd;
            }
            out << " |\n";
        }
    } else {
        out << "method,L_P_mean,L_P_sd,L_Q_mean,L_Q_sd,L_N_mean,L_N_sd\n";
        for (int m = 0; m < 2; ++m) {
            out << names[m];
            for (int c = 0; c < 3; ++c) out << ',' << summary.stats[m][c].mean << ',' << summary.stats[m][c].sd;
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace pgl

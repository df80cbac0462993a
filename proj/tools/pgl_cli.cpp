// pgl: learn the factor graphs of a Cartesian product graph from smooth
// multidomain data.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 solver failure.

#include <array>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgl/completion.hpp"
#include "pgl/error.hpp"
#include "pgl/evaluation.hpp"
#include "pgl/experiment.hpp"
#include "pgl/io.hpp"
#include "pgl/learners.hpp"

namespace fs = std::filesystem;
using namespace pgl;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

void save_laplacian(const fs::path& path, const Laplacian& L) {
    if (path.extension() == ".json") {
        io::save_graph_json(path, L);
    } else {
        io::save_matrix(path, L.matrix());
    }
}

struct SolverFlags {
    std::string solver = "waterfill";
    int max_sweeps = WaterfillOptions{}.max_sweeps;
    double tol = WaterfillOptions{}.tol_primal;
    int pg_iters = PGOptions{}.max_iters;

    void add(CLI::App* app) {
        app->add_option("--solver", solver, "QP solver: waterfill or pg")
            ->check(CLI::IsMember({"waterfill", "pg"}))
            ->capture_default_str();
        app->add_option("--max-sweeps", max_sweeps, "water-filling sweep budget")->capture_default_str();
        app->add_option("--tol", tol, "water-filling primal/KKT tolerance")->capture_default_str();
        app->add_option("--pg-iters", pg_iters, "projected-gradient iteration budget")->capture_default_str();
    }

    SolverSettings settings() const {
        SolverSettings s;
        s.kind = parse_solver_kind(solver);
        s.waterfill.max_sweeps = max_sweeps;
        s.waterfill.tol_primal = tol;
        s.waterfill.tol_kkt = tol;
        s.pg.max_iters = pg_iters;
        return s;
    }
};

struct DataFlags {
    std::string data;
    bool header = false;
    Index P = 0;
    Index Q = 0;

    void add(CLI::App* app) {
        app->add_option("--data", data, "N x T data CSV (sidecar <stem>.json gives P and Q)")->required();
        app->add_flag("--header", header, "skip the first line of every input CSV");
        app->add_option("--p", P, "size of the first factor (overrides the sidecar)");
        app->add_option("--q", Q, "size of the second factor (overrides the sidecar)");
    }

    MultidomainData load() const { return io::load_dataset(data, P, Q, header); }
};

struct WeightFlags {
    double alpha = LearnConfig{}.alpha;
    double beta1 = LearnConfig{}.beta1;
    double beta2 = LearnConfig{}.beta2;
    bool no_normalize = false;

    void add(CLI::App* app, bool with_beta2 = true) {
        app->add_option("--alpha", alpha, "smoothness weight")->capture_default_str();
        app->add_option("--beta1", beta1, "Frobenius weight on L_P (full graph: its weight)")->capture_default_str();
        if (with_beta2) app->add_option("--beta2", beta2, "Frobenius weight on L_Q")->capture_default_str();
        app->add_flag("--no-normalize", no_normalize, "do not rescale data to unit mean snapshot energy");
    }

    LearnConfig config(const SolverFlags& s) const {
        LearnConfig cfg;
        cfg.alpha = alpha;
        cfg.beta1 = beta1;
        cfg.beta2 = beta2;
        cfg.solver = s.settings();
        cfg.normalize_data = !no_normalize;
        return cfg;
    }
};

std::vector<GridPoint> make_grid(const std::vector<double>& alphas, const std::vector<double>& betas) {
    if (alphas.empty() && betas.empty()) return default_grid();
    const std::vector<double> a = alphas.empty() ? std::vector<double>{0.01, 0.1, 1.0} : alphas;
    const std::vector<double> b = betas.empty() ? std::vector<double>{0.1, 0.5, 1.0, 5.0} : betas;
    std::vector<GridPoint> grid;
    for (double x : a) {
        for (double y : b) grid.push_back({x, y, y});
    }
    return grid;
}

// ---- generate ---------------------------------------------------------------

struct GenerateCmd {
    std::string manifest_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    ExperimentManifest m;

    void add(CLI::App* app) {
        app->add_option("--manifest", manifest_path, "experiment manifest JSON (flags override it)");
        app->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
        app->add_option("--seed", seed, "random seed")->capture_default_str();
        app->add_option("--p", m.graph_p.n, "nodes in factor P")->capture_default_str();
        app->add_option("--q", m.graph_q.n, "nodes in factor Q")->capture_default_str();
        app->add_option("--communities-p", m.graph_p.k, "communities in factor P")->capture_default_str();
        app->add_option("--communities-q", m.graph_q.k, "communities in factor Q")->capture_default_str();
        app->add_option("--p-in", m.graph_p.p_in, "intra-community edge probability")->capture_default_str();
        app->add_option("--p-out", m.graph_p.p_out, "inter-community edge probability")->capture_default_str();
        app->add_option("--weight-low", m.graph_p.weight_low, "lower edge weight")->capture_default_str();
        app->add_option("--weight-high", m.graph_p.weight_high, "upper edge weight")->capture_default_str();
        app->add_option("--t", m.T, "number of snapshots")->capture_default_str();
        app->add_option("--sigma", m.sigma, "additive noise sd (negative: 0.1 x smooth sd)")->capture_default_str();
        app->add_option("--missing-fraction", m.missing_fraction, "fraction of entries hidden (writes mask)")
            ->capture_default_str();
        app->add_option("--mask-noise", m.mask_noise, "noise sd on observed entries")->capture_default_str();
    }

    int run(CLI::App* app) {
        ExperimentManifest base;
        if (!manifest_path.empty()) base = ExperimentManifest::from_json(io::load_json(manifest_path));
        auto given = [&](const char* name) { return app->count(name) > 0 || manifest_path.empty(); };
        // Shared community flags apply to both factors.
        if (given("--p")) base.graph_p.n = m.graph_p.n;
        if (given("--q")) base.graph_q.n = m.graph_q.n;
        if (given("--communities-p")) base.graph_p.k = m.graph_p.k;
        if (given("--communities-q")) base.graph_q.k = m.graph_q.k;
        for (CommunityGraphConfig* g : {&base.graph_p, &base.graph_q}) {
            if (given("--p-in")) g->p_in = m.graph_p.p_in;
            if (given("--p-out")) g->p_out = m.graph_p.p_out;
            if (given("--weight-low")) g->weight_low = m.graph_p.weight_low;
            if (given("--weight-high")) g->weight_high = m.graph_p.weight_high;
        }
        if (given("--t")) base.T = m.T;
        if (given("--sigma")) base.sigma = m.sigma;
        if (given("--missing-fraction")) base.missing_fraction = m.missing_fraction;
        if (given("--mask-noise")) base.mask_noise = m.mask_noise;
        if (given("--seed")) base.seed = seed;
        if (given("--out-dir")) base.output_dir = out_dir;
        const SyntheticInstance inst = generate_instance(base, base.seed);
        write_instance(base.output_dir, base, inst);
        std::cout << "seed " << base.seed << "\n"
                  << "wrote " << base.output_dir.string() << " (P=" << inst.data.P() << ", Q=" << inst.data.Q()
                  << ", T=" << inst.data.T() << ", sigma=" << inst.sigma << ")\n";
        return 0;
    }
};

// ---- learn / learn-baseline -------------------------------------------------

struct LearnCmd {
    DataFlags data;
    WeightFlags weights;
    SolverFlags solver;
    std::string out_lp, out_lq, dump_qp, trace;

    void add(CLI::App* app) {
        data.add(app);
        weights.add(app);
        solver.add(app);
        app->add_option("--out-lp", out_lp, "output L_P (.csv or .json)")->required();
        app->add_option("--out-lq", out_lq, "output L_Q (.csv or .json)")->required();
        app->add_option("--dump-qp", dump_qp, "directory receiving H, q, C, b as CSV");
        app->add_option("--trace", trace, "water-filling convergence trace CSV");
    }

    int run() {
        const MultidomainData d = data.load();
        LearnConfig cfg = weights.config(solver);
        cfg.solver.waterfill.record_trace = !trace.empty();
        if (!dump_qp.empty()) {
            MultidomainData scaled = d;
            if (cfg.normalize_data) scaled.data() *= normalization_scale(d.data());
            io::dump_qp(dump_qp, build_factor_qp(scaled, cfg.alpha, cfg.beta1, cfg.beta2));
        }
        SolveReport report;
        const FactorLaplacians f = learn_product_graph(d, cfg, &report);
        save_laplacian(out_lp, f.Lp);
        save_laplacian(out_lq, f.Lq);
        if (!trace.empty()) io::save_waterfill_trace(trace, report.trace);
        std::cout << "solver " << to_string(report.used) << ", iterations " << report.iterations
                  << ", primal residual " << report.primal_residual << "\n";
        return 0;
    }
};

struct BaselineCmd {
    DataFlags data;
    WeightFlags weights;
    SolverFlags solver;
    std::string out_lp, out_lq, out_ln;

    void add(CLI::App* app) {
        data.add(app);
        weights.add(app, false);
        solver.add(app);
        app->add_option("--out-lp", out_lp, "output L_P")->required();
        app->add_option("--out-lq", out_lq, "output L_Q")->required();
        app->add_option("--out-ln", out_ln, "output full-graph L_N")->required();
    }

    int run() {
        const MultidomainData d = data.load();
        const TwoStepResult r = learn_two_step(d, weights.config(solver), solver.settings());
        save_laplacian(out_lp, r.Lp);
        save_laplacian(out_lq, r.Lq);
        save_laplacian(out_ln, r.Ln_full);
        return 0;
    }
};

// ---- gridsearch -------------------------------------------------------------

struct GridCmd {
    DataFlags data;
    SolverFlags solver;
    std::string truth_lp, truth_lq, out, method = "one-step";
    std::vector<double> alphas, betas;
    double threshold = kDefaultEdgeThreshold;
    unsigned jobs = 1;
    bool no_normalize = false;

    void add(CLI::App* app) {
        data.add(app);
        solver.add(app);
        app->add_option("--truth-lp", truth_lp, "ground-truth L_P")->required();
        app->add_option("--truth-lq", truth_lq, "ground-truth L_Q")->required();
        app->add_option("--method", method, "one-step or two-step")
            ->check(CLI::IsMember({"one-step", "two-step"}))
            ->capture_default_str();
        app->add_option("--alphas", alphas, "alpha values (default 0.01 0.1 1)");
        app->add_option("--betas", betas, "beta1 = beta2 values (default 0.1 0.5 1 5)");
        app->add_option("--threshold", threshold, "edge threshold after trace normalization")->capture_default_str();
        app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
        app->add_flag("--no-normalize", no_normalize, "do not rescale the data");
        app->add_option("--out", out, "score-table CSV")->required();
    }

    int run() {
        const MultidomainData d = data.load();
        const FactorLaplacians truth{io::load_laplacian(truth_lp, data.header),
                                     io::load_laplacian(truth_lq, data.header)};
        GridSearchOptions opts;
        opts.method = method == "one-step" ? Method::OneStep : Method::TwoStep;
        opts.solver = solver.settings();
        opts.threshold = threshold;
        opts.jobs = jobs;
        opts.normalize_data = !no_normalize;
        const GridSearchResult res = grid_search(d, make_grid(alphas, betas), truth, opts);
        io::atomic_write(out, [&](std::ostream& os) {
            os << "alpha,beta1,beta2,f_p,f_q,f_n,score,seconds\n";
            for (const auto& row : res.rows) {
                os << io::format_double(row.point.alpha) << ',' << io::format_double(row.point.beta1) << ','
                   << io::format_double(row.point.beta2) << ',' << io::format_double(row.f_p) << ','
                   << io::format_double(row.f_q) << ',' << io::format_double(row.f_n) << ','
                   << io::format_double(row.score) << ',' << io::format_double(row.seconds) << '\n';
            }
        });
        const GridRow& best = res.rows[res.best_index];
        std::cout << "best alpha=" << best.point.alpha << " beta1=" << best.point.beta1
                  << " beta2=" << best.point.beta2 << "  F(L_P)=" << best.f_p << " F(L_Q)=" << best.f_q
                  << " F(L_N)=" << best.f_n << "\n";
        return 0;
    }
};

// ---- complete ---------------------------------------------------------------

struct CompleteCmd {
    DataFlags data;
    WeightFlags weights;
    SolverFlags solver;
    std::string mask, out_x, out_lp, out_lq, trace;
    CompletionConfig comp;

    void add(CLI::App* app) {
        data.add(app);
        weights.add(app);
        solver.add(app);
        app->add_option("--mask", mask, "0/1 observation mask CSV aligned with --data")->required();
        app->add_option("--gamma", comp.gamma_nuc, "nuclear-norm weight")->capture_default_str();
        app->add_option("--inner-iters", comp.inner_iters, "proximal-gradient steps per snapshot")->capture_default_str();
        app->add_option("--outer-iters", comp.outer_iters, "alternation budget")->capture_default_str();
        app->add_option("--tol-outer", comp.tol_outer, "relative objective change to stop")->capture_default_str();
        app->add_option("--out-x", out_x, "completed N x T data")->required();
        app->add_option("--out-lp", out_lp, "output L_P")->required();
        app->add_option("--out-lq", out_lq, "output L_Q")->required();
        app->add_option("--trace", trace, "outer objective trace CSV");
    }

    int run() {
        const MultidomainData observed = data.load();
        MaskedData masked{observed.P(), observed.Q(), observed.data(), io::load_matrix(mask, data.header)};
        check_masked(masked);
        const JointResult r = alternate_joint(masked, weights.config(solver), comp);
        io::save_matrix(out_x, r.X.data());
        save_laplacian(out_lp, r.Lp);
        save_laplacian(out_lq, r.Lq);
        if (!trace.empty()) {
            io::atomic_write(trace, [&](std::ostream& os) {
                os << "outer,objective\n";
                for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
                    os << i + 1 << ',' << io::format_double(r.objective_trace[i]) << '\n';
                }
            });
        }
        std::cout << "outer iterations " << r.outer_iterations << (r.converged ? " (converged)" : " (budget)")
                  << ", final objective " << r.objective_trace.back() << "\n";
        return 0;
    }
};

// ---- eval -------------------------------------------------------------------

struct EvalCmd {
    std::string truth_lp, truth_lq, format = "markdown";
    std::vector<std::string> lp, lq, ln, labels;
    double threshold = kDefaultEdgeThreshold;
    bool header = false;

    void add(CLI::App* app) {
        app->add_option("--truth-lp", truth_lp, "ground-truth L_P")->required();
        app->add_option("--truth-lq", truth_lq, "ground-truth L_Q")->required();
        app->add_option("--lp", lp, "estimated L_P, one per method")->required();
        app->add_option("--lq", lq, "estimated L_Q, one per method")->required();
        app->add_option("--ln", ln, "estimated full L_N per method; empty or omitted: L_P (+) L_Q");
        app->add_option("--label", labels, "method names");
        app->add_option("--threshold", threshold, "edge threshold after trace normalization")->capture_default_str();
        app->add_option("--format", format, "csv or markdown")
            ->check(CLI::IsMember({"csv", "markdown"}))
            ->capture_default_str();
        app->add_flag("--header", header, "skip the first line of every input CSV");
    }

    int run() {
        if (lp.size() != lq.size() || (!ln.empty() && ln.size() != lp.size()) ||
            (!labels.empty() && labels.size() != lp.size())) {
            throw CLI::ValidationError("--lp, --lq, --ln and --label must be given the same number of times");
        }
        const Laplacian tp = io::load_laplacian(truth_lp, header);
        const Laplacian tq = io::load_laplacian(truth_lq, header);
        const Laplacian tn = cartesian_sum(tp, tq);
        // Load everything first so a bad file does not leave a half-printed table.
        std::vector<std::array<double, 3>> rows;
        for (std::size_t m = 0; m < lp.size(); ++m) {
            const Laplacian ep = io::load_laplacian(lp[m], header);
            const Laplacian eq = io::load_laplacian(lq[m], header);
            const bool own_ln = !ln.empty() && !ln[m].empty();
            const Laplacian en = own_ln ? io::load_laplacian(ln[m], header) : cartesian_sum(ep, eq);
            rows.push_back({f_measure(tp, ep, threshold).f_measure, f_measure(tq, eq, threshold).f_measure,
                            f_measure(tn, en, threshold).f_measure});
        }
        const bool md = format == "markdown";
        std::cout << (md ? "| Method | L_P | L_Q | L_N |\n|---|---|---|---|\n" : "method,L_P,L_Q,L_N\n");
        for (std::size_t m = 0; m < rows.size(); ++m) {
            const auto& f = rows[m];
            const std::string name = labels.empty() ? "method " + std::to_string(m + 1) : labels[m];
            if (md) {
                std::cout << "| " << name << " | " << f[0] << " | " << f[1] << " | " << f[2] << " |\n";
            } else {
                std::cout << name << ',' << f[0] << ',' << f[1] << ',' << f[2] << '\n';
            }
        }
        return 0;
    }
};

// ---- reproduce-table1 -------------------------------------------------------

struct Table1Cmd {
    std::string out_dir = "table1";
    std::string manifest_path;
    std::size_t seeds = 10;
    std::uint64_t first_seed = 1;
    unsigned jobs = 1;
    SolverFlags solver;

    void add(CLI::App* app) {
        app->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
        app->add_option("--manifest", manifest_path, "experiment manifest JSON");
        app->add_option("--seeds", seeds, "number of seeds")->capture_default_str();
        app->add_option("--first-seed", first_seed, "first seed")->capture_default_str();
        app->add_option("--jobs", jobs, "worker threads per grid")->capture_default_str();
        solver.add(app);
    }

    int run() {
        ExperimentManifest m;
        if (!manifest_path.empty()) m = ExperimentManifest::from_json(io::load_json(manifest_path));
        m.output_dir = out_dir;
        Table1Options opts;
        for (std::size_t i = 0; i < seeds; ++i) opts.seeds.push_back(first_seed + i);
        opts.solver = solver.settings();
        opts.jobs = jobs;
        opts.verbose = true;
        std::cout << "seeds " << first_seed << ".." << first_seed + seeds - 1 << "\n";
        const Table1Result r = run_table1(m, opts);
        const fs::path dir = out_dir;
        write_per_seed_csv(dir / "per_seed.csv", r);
        io::atomic_write(dir / "table1.md", [&](std::ostream& os) { os << format_table(r.summary, true); });
        io::atomic_write(dir / "table1.csv", [&](std::ostream& os) { os << format_table(r.summary, false); });
        nlohmann::json man = m.to_json();
        man["seeds"] = opts.seeds;
        io::save_json(dir / "manifest.json", man);
        std::cout << format_table(r.summary, true);
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn the factor graphs of a Cartesian product graph from smooth multidomain data"};
    app.require_subcommand(1);

    GenerateCmd generate;
    LearnCmd learn;
    BaselineCmd baseline;
    GridCmd grid;
    CompleteCmd complete;
    EvalCmd eval;
    Table1Cmd table1;

    auto* g = app.add_subcommand("generate", "synthetic community factor graphs and smooth data");
    generate.add(g);
    auto* l = app.add_subcommand("learn", "one-step factor learning (water-filling)");
    learn.add(l);
    auto* b = app.add_subcommand("learn-baseline", "two-step baseline: full graph, then factorization");
    baseline.add(b);
    auto* s = app.add_subcommand("gridsearch", "score a grid of regularizers against ground truth");
    grid.add(s);
    auto* c = app.add_subcommand("complete", "joint matrix completion and factor learning");
    complete.add(c);
    auto* e = app.add_subcommand("eval", "F-measure table against ground truth");
    eval.add(e);
    auto* t = app.add_subcommand("reproduce-table1", "synthetic benchmark over several seeds");
    table1.add(t);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (g->parsed()) return generate.run(g);
        if (l->parsed()) return learn.run();
        if (b->parsed()) return baseline.run();
        if (s->parsed()) return grid.run();
        if (c->parsed()) return complete.run();
        if (e->parsed()) return eval.run();
        if (t->parsed()) return table1.run();
    } catch (const CLI::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const SolverError& err) {
        std::cerr << "solver error: " << err.what() << "\n";
        return kExitSolver;
    } catch (const DataError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return kExitData;
    } catch (const DimensionError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& err) {
        std::cerr << "I/O error: " << err.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

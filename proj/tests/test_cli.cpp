#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>

#include "pgl/io.hpp"

namespace fs = std::filesystem;
using namespace pgl;

namespace {

struct WorkDir {
    fs::path path;
    WorkDir() {
        path = fs::temp_directory_path() / ("pgl_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~WorkDir() { fs::remove_all(path); }
} work;

const fs::path& work_dir() { return work.path; }

int run(const std::string& args, const std::string& log = "log.txt") {
    const std::string cmd = std::string("\"") + PGL_CLI_PATH + "\" " + args + " > \"" +
                            (work_dir() / log).string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dir(const char* name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("generate is deterministic and has the default shapes") {
    REQUIRE(run("generate --seed 7 --out-dir " + dir("g1")) == 0);
    REQUIRE(run("generate --seed 7 --out-dir " + dir("g2")) == 0);
    for (const char* f : {"lp_true.csv", "lq_true.csv", "data.csv", "data.json"}) {
        CHECK(slurp(work_dir() / "g1" / f) == slurp(work_dir() / "g2" / f));
    }
    CHECK(io::load_matrix(work_dir() / "g1" / "lp_true.csv").rows() == 10);
    CHECK(io::load_matrix(work_dir() / "g1" / "lq_true.csv").cols() == 15);
    const Matrix X = io::load_matrix(work_dir() / "g1" / "data.csv");
    CHECK(X.rows() == 150);
    CHECK(X.cols() == 50);
    const auto side = io::load_json(work_dir() / "g1" / "data.json");
    CHECK(side["P"] == 10);
    CHECK(side["Q"] == 15);
    CHECK(side["seed"] == 7);

    REQUIRE(run("generate --seed 8 --out-dir " + dir("g3")) == 0);
    CHECK(slurp(work_dir() / "g1" / "data.csv") != slurp(work_dir() / "g3" / "data.csv"));
}

TEST_CASE("single-node factors") {
    REQUIRE(run("generate --p 1 --q 1 --communities-p 1 --communities-q 1 --t 5 --out-dir " + dir("one")) == 0);
    CHECK(io::load_matrix(work_dir() / "one" / "lp_true.csv") == Matrix::Zero(1, 1));
    CHECK(io::load_matrix(work_dir() / "one" / "data.csv").rows() == 1);
}

TEST_CASE("learn, baseline and eval") {
    REQUIRE(run("generate --seed 3 --p 6 --q 5 --communities-q 1 --t 30 --out-dir " + dir("s")) == 0);
    const std::string data = dir("s") + "/data.csv";
    REQUIRE(run("learn --data " + data + " --out-lp " + dir("s") + "/lp.csv --out-lq " + dir("s") +
                "/lq.json --dump-qp " + dir("s") + "/qp --trace " + dir("s") + "/trace.csv") == 0);
    CHECK(io::load_matrix(work_dir() / "s" / "lp.csv").rows() == 6);
    CHECK(io::load_laplacian(work_dir() / "s" / "lq.json").n() == 5);
    CHECK(io::load_matrix(work_dir() / "s" / "qp" / "C.csv").rows() == 7 + 6);
    CHECK(fs::exists(work_dir() / "s" / "trace.csv"));

    REQUIRE(run("learn-baseline --data " + data + " --out-lp " + dir("s") + "/blp.csv --out-lq " + dir("s") +
                "/blq.csv --out-ln " + dir("s") + "/bln.csv") == 0);
    CHECK(io::load_matrix(work_dir() / "s" / "bln.csv").rows() == 30);

    REQUIRE(run("eval --truth-lp " + dir("s") + "/lp_true.csv --truth-lq " + dir("s") + "/lq_true.csv --lp " +
                    dir("s") + "/lp.csv --lq " + dir("s") + "/lq.json --label ours --lp " + dir("s") +
                    "/blp.csv --lq " + dir("s") + "/blq.csv --label baseline --format csv",
                "eval.txt") == 0);
    const std::string table = slurp(work_dir() / "eval.txt");
    CHECK(table.find("method,L_P,L_Q,L_N") != std::string::npos);
    CHECK(table.find("ours,") != std::string::npos);
    CHECK(table.find("baseline,") != std::string::npos);

    // An empty --ln entry falls back to L_P (+) L_Q for that row only.
    REQUIRE(run("eval --truth-lp " + dir("s") + "/lp_true.csv --truth-lq " + dir("s") + "/lq_true.csv --lp " +
                    dir("s") + "/lp.csv --lq " + dir("s") + "/lq.json --ln '' --lp " + dir("s") + "/blp.csv --lq " +
                    dir("s") + "/blq.csv --ln " + dir("s") + "/bln.csv --format csv",
                "eval_ln.txt") == 0);
    CHECK(slurp(work_dir() / "eval_ln.txt").find("method 2,") != std::string::npos);

    // A missing input is reported before any of the table is printed.
    CHECK(run("eval --truth-lp " + dir("s") + "/lp_true.csv --truth-lq " + dir("s") + "/lq_true.csv --lp " +
                  dir("s") + "/lp.csv --lq " + dir("s") + "/lq.json --lp " + dir("s") + "/missing.csv --lq " +
                  dir("s") + "/blq.csv",
              "eval_bad.txt") == 2);
    CHECK(slurp(work_dir() / "eval_bad.txt").find("L_P") == std::string::npos);
}

TEST_CASE("gridsearch writes one row per grid point") {
    REQUIRE(run("generate --seed 4 --p 6 --q 5 --communities-q 1 --t 30 --out-dir " + dir("gs")) == 0);
    REQUIRE(run("gridsearch --data " + dir("gs") + "/data.csv --truth-lp " + dir("gs") + "/lp_true.csv --truth-lq " +
                dir("gs") + "/lq_true.csv --alphas 0.1 1 --betas 0.5 1 5 --out " + dir("gs") + "/grid.csv") == 0);
    const Matrix g = io::load_matrix(work_dir() / "gs" / "grid.csv", true);
    CHECK(g.rows() == 6);
    CHECK(g.cols() == 8);
    REQUIRE(run("gridsearch --method two-step --data " + dir("gs") + "/data.csv --truth-lp " + dir("gs") +
                "/lp_true.csv --truth-lq " + dir("gs") + "/lq_true.csv --alphas 0.1 --betas 1 --out " + dir("gs") +
                "/grid2.csv") == 0);
    CHECK(io::load_matrix(work_dir() / "gs" / "grid2.csv", true).rows() == 1);
}

TEST_CASE("complete") {
    REQUIRE(run("generate --seed 5 --p 6 --q 5 --communities-q 1 --t 20 --missing-fraction 0.2 --out-dir " +
                dir("c")) == 0);
    REQUIRE(fs::exists(work_dir() / "c" / "mask.csv"));
    REQUIRE(run("complete --data " + dir("c") + "/observed.csv --mask " + dir("c") + "/mask.csv --outer-iters 5 --out-x " +
                dir("c") + "/x.csv --out-lp " + dir("c") + "/lp.csv --out-lq " + dir("c") + "/lq.csv --trace " +
                dir("c") + "/obj.csv") == 0);
    const Matrix X = io::load_matrix(work_dir() / "c" / "x.csv");
    CHECK(X.rows() == 30);
    CHECK(X.cols() == 20);
}

TEST_CASE("reproduce-table1 with a small manifest") {
    const nlohmann::json man = {{"seed", 1}, {"T", 20},
                                {"graph_p", {{"n", 6}, {"k", 2}, {"p_in", 0.8}, {"p_out", 0.05},
                                             {"weight_low", 0.5}, {"weight_high", 1.5}}},
                                {"graph_q", {{"n", 5}, {"k", 1}, {"p_in", 0.7}, {"p_out", 0.0},
                                             {"weight_low", 0.5}, {"weight_high", 1.5}}}};
    io::save_json(work_dir() / "man.json", man);
    REQUIRE(run("reproduce-table1 --seeds 2 --manifest " + dir("man.json") + " --out-dir " + dir("t1")) == 0);
    const Matrix per_seed = io::load_matrix(work_dir() / "t1" / "per_seed.csv", true);
    CHECK(per_seed.rows() == 2 * 12);
    CHECK(fs::exists(work_dir() / "t1" / "table1.md"));
    CHECK(fs::exists(work_dir() / "t1" / "manifest.json"));
}

TEST_CASE("exit codes") {
    CHECK(run("") == 1);
    CHECK(run("learn --bogus") == 1);
    CHECK(run("learn --data " + dir("missing.csv") + " --p 2 --q 2 --out-lp a.csv --out-lq b.csv") == 2);

    std::ofstream(work_dir() / "ragged.csv") << "1,2\n3\n";
    CHECK(run("learn --data " + dir("ragged.csv") + " --p 2 --q 1 --out-lp a.csv --out-lq b.csv") == 2);

    REQUIRE(run("generate --seed 6 --p 6 --q 5 --communities-q 1 --t 30 --out-dir " + dir("x")) == 0);
    CHECK(run("learn --data " + dir("x") + "/data.csv --max-sweeps 1 --out-lp " + dir("x") + "/a.csv --out-lq " +
              dir("x") + "/b.csv") == 3);
    CHECK_FALSE(fs::exists(work_dir() / "x" / "a.csv"));
}

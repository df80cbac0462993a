#include "pgl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "pgl/error.hpp"

namespace pgl::io {

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    if (path.has_parent_path() && !path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::random_device rd;
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
        try {
            writer(out);
        } catch (...) {
            out.close();
            fs::remove(tmp);
            throw;
        }
        out.flush();
        if (!out) {
            fs::remove(tmp);
            throw DataError("write failed for '" + path.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw DataError("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_cell(std::string_view cell, const std::string& source, std::size_t row, std::size_t col) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
        cell.remove_suffix(1);
    }
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    const std::string where = source + ": row " + std::to_string(row) + ", column " + std::to_string(col);
    if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw DataError(where + ": cannot parse '" + std::string(cell) + "' as a number");
    }
    if (!std::isfinite(v)) throw DataError(where + ": non-finite value");
    return v;
}

}  // namespace

Matrix parse_matrix(std::istream& in, const std::string& source, bool skip_header) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    if (skip_header && std::getline(in, line)) ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            const std::string_view cell(line.data() + start,
                                        (comma == std::string::npos ? line.size() : comma) - start);
            row.push_back(parse_cell(cell, source, line_no, row.size() + 1));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError(source + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " columns, expected " +
                            std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    const Index r = static_cast<Index>(rows.size());
    const Index c = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
    Matrix M(r, c);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < c; ++j) M(i, j) = rows[i][j];
    }
    return M;
}

void write_matrix(std::ostream& out, const Matrix& M) {
    std::string line;
    for (Index i = 0; i < M.rows(); ++i) {
        line.clear();
        for (Index j = 0; j < M.cols(); ++j) {
            if (!std::isfinite(M(i, j))) {
                throw DataError("refusing to write non-finite value at row " + std::to_string(i + 1));
            }
            if (j) line += ',';
            line += format_double(M(i, j));
        }
        line += '\n';
        out << line;
    }
}

Matrix load_matrix(const fs::path& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_matrix(in, path.string(), skip_header);
}

void save_matrix(const fs::path& path, const Matrix& M) {
    atomic_write(path, [&](std::ostream& out) { write_matrix(out, M); });
}

nlohmann::json graph_to_json(const Laplacian& L) {
    nlohmann::json edges = nlohmann::json::array();
    for (Index i = 0; i < L.n(); ++i) {
        for (Index j = i + 1; j < L.n(); ++j) {
            const double w = -L(i, j);
            if (w != 0.0) edges.push_back({i + 1, j + 1, w});
        }
    }
    return {{"n", L.n()}, {"edges", edges}};
}

Laplacian graph_from_json(const nlohmann::json& j) {
    try {
        const Index n = j.at("n").get<Index>();
        if (n < 1) throw DataError("graph JSON: n must be positive");
        EdgeWeights w{n, Vector::Zero(EdgeWeights::expected_length(n))};
        std::size_t k = 0;
        for (const auto& e : j.at("edges")) {
            ++k;
            if (!e.is_array() || e.size() != 3) {
                throw DataError("graph JSON: edge " + std::to_string(k) + " must be [i, j, weight]");
            }
            const Index a = e[0].get<Index>();
            const Index b = e[1].get<Index>();
            const double weight = e[2].get<double>();
            if (a < 1 || b < 1 || a > n || b > n) {
                throw DataError("graph JSON: edge " + std::to_string(k) + " has node index outside 1.." +
                                std::to_string(n) + " (indices are 1-based)");
            }
            if (a == b) throw DataError("graph JSON: edge " + std::to_string(k) + " is a self-loop");
            if (!std::isfinite(weight) || weight < 0.0) {
                throw DataError("graph JSON: edge " + std::to_string(k) + " has an invalid weight");
            }
            const Index hi = std::max(a, b) - 1;
            const Index lo = std::min(a, b) - 1;
            w.w[strict_lower_index(n, hi, lo)] += weight;
        }
        return laplacian_from_weights(w);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("graph JSON: ") + e.what());
    }
}

nlohmann::json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_json(const fs::path& path, const nlohmann::json& j) {
    atomic_write(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

Laplacian load_graph_json(const fs::path& path) { return graph_from_json(load_json(path)); }

void save_graph_json(const fs::path& path, const Laplacian& L) { save_json(path, graph_to_json(L)); }

Laplacian load_laplacian(const fs::path& path, bool skip_header) {
    if (path.extension() == ".json") return load_graph_json(path);
    Matrix M = load_matrix(path, skip_header);
    if (M.rows() != M.cols()) {
        throw DataError(path.string() + ": Laplacian must be square, got " + std::to_string(M.rows()) +
                        "x" + std::to_string(M.cols()));
    }
    return Laplacian(std::move(M));
}

fs::path sidecar_path(const fs::path& data_csv) {
    fs::path p = data_csv;
    p.replace_extension(".json");
    return p;
}

MultidomainData load_dataset(const fs::path& data_csv, Index P, Index Q, bool skip_header) {
    Matrix X = load_matrix(data_csv, skip_header);
    if (P <= 0 || Q <= 0) {
        const fs::path side = sidecar_path(data_csv);
        if (!fs::exists(side)) {
            throw DataError("no P/Q given and sidecar '" + side.string() + "' not found");
        }
        const auto j = load_json(side);
        try {
            if (P <= 0) P = j.at("P").get<Index>();
            if (Q <= 0) Q = j.at("Q").get<Index>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(side.string() + ": " + e.what());
        }
    }
    if (X.rows() != P * Q) {
        throw DataError(data_csv.string() + ": has " + std::to_string(X.rows()) +
                        " rows, expected P*Q = " + std::to_string(P * Q));
    }
    return MultidomainData(P, Q, std::move(X));
}

void dump_qp(const fs::path& dir, const StandardQP& qp) {
    fs::create_directories(dir);
    save_matrix(dir / "hess_diag.csv", qp.hess_diag);
    save_matrix(dir / "q.csv", qp.q);
    save_matrix(dir / "C.csv", qp.C);
    save_matrix(dir / "b.csv", qp.b);
}

void save_waterfill_trace(const fs::path& path, const std::vector<WaterfillTraceRow>& trace) {
    atomic_write(path, [&](std::ostream& out) {
        out << "sweep,primal_residual,dual_objective\n";
        for (const auto& row : trace) {
            out << row.sweep << ',' << format_double(row.primal_residual) << ','
                << format_double(row.dual_objective) << '\n';
        }
    });
}

}  // namespace pgl::io

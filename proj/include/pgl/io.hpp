#pragma once

// File formats:
//   matrix CSV  - one row per line, comma separated, shortest round-trip decimals
//   graph JSON  - {"n": int, "edges": [[i, j, weight], ...]}, 1-based indices
//   dataset     - N x T matrix CSV plus a JSON sidecar with at least {"P", "Q"}

#include <filesystem>
#include <functional>
#include <string>

#include <json.hpp>

#include "pgl/graph.hpp"
#include "pgl/qp.hpp"
#include "pgl/signal.hpp"
#include "pgl/waterfill.hpp"

namespace pgl::io {

namespace fs = std::filesystem;

/// Writes through a temporary file in the same directory, then renames it
/// over `path`, so readers never see a partial file.
void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer);

std::string format_double(double v);

Matrix load_matrix(const fs::path& path, bool skip_header = false);
void save_matrix(const fs::path& path, const Matrix& M);

Matrix parse_matrix(std::istream& in, const std::string& source, bool skip_header = false);
void write_matrix(std::ostream& out, const Matrix& M);

Laplacian load_graph_json(const fs::path& path);
void save_graph_json(const fs::path& path, const Laplacian& L);
nlohmann::json graph_to_json(const Laplacian& L);
Laplacian graph_from_json(const nlohmann::json& j);

/// Laplacian from either format, picked by extension (.json or anything else = CSV).
Laplacian load_laplacian(const fs::path& path, bool skip_header = false);

/// Sidecar path for a dataset CSV: same stem, ".json" extension.
fs::path sidecar_path(const fs::path& data_csv);

nlohmann::json load_json(const fs::path& path);
void save_json(const fs::path& path, const nlohmann::json& j);

/// P and Q from the sidecar unless given (> 0) explicitly.
MultidomainData load_dataset(const fs::path& data_csv, Index P = 0, Index Q = 0, bool skip_header = false);

/// Writes hess_diag.csv, q.csv, C.csv, b.csv under `dir`.
void dump_qp(const fs::path& dir, const StandardQP& qp);

void save_waterfill_trace(const fs::path& path, const std::vector<WaterfillTraceRow>& trace);

}  // namespace pgl::io

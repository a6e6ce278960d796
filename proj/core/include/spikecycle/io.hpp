// File and matrix I/O.
//
// Writes are atomic: content lands in a temporary file next to the
// target and is renamed into place, so readers never observe a partial
// file. Matrix CSV carries a one-line header with dimensions and
// provenance.
#pragma once

#include <string>

#include "spikecycle/model.hpp"

namespace spikecycle {

[[nodiscard]] std::string read_file(const std::string& path);

void atomic_write_file(const std::string& path, const std::string& content);

// 17 significant digits, enough to round-trip a double exactly.
[[nodiscard]] std::string format_double(double v);

// Header: "# spikecycle matrix v1 n=<n> p=<p> hypothesis=<h> seed=<s>"
// followed by n comma-separated rows.
[[nodiscard]] std::string to_csv(const DataMatrix& x);
[[nodiscard]] DataMatrix matrix_from_csv_text(const std::string& text);
[[nodiscard]] DataMatrix load_matrix_csv(const std::string& path);

}  // namespace spikecycle

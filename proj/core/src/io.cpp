#include "spikecycle/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spikecycle {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (!in.good() && !in.eof())
    throw std::runtime_error("read failed: " + path);
  return os.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir =
      target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::path temp = dir / (target.filename().string() + ".tmp-spikecycle");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " +
                                       temp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out.good())
      throw std::runtime_error("write failed: " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    throw std::runtime_error("rename failed for " + path + ": " +
                             ec.message());
  }
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string to_csv(const DataMatrix& x) {
  std::ostringstream os;
  os << "# spikecycle matrix v1 n=" << x.n() << " p=" << x.p()
     << " hypothesis=" << to_string(x.provenance) << " seed=" << x.seed
     << "\n";
  for (int i = 0; i < x.n(); ++i) {
    for (int j = 0; j < x.p(); ++j) {
      if (j) os << ",";
      os << format_double(x.values(i, j));
    }
    os << "\n";
  }
  return os.str();
}

DataMatrix matrix_from_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  DataMatrix out;
  int n = -1, p = -1;
  // Header.
  if (!std::getline(in, line) || line.rfind("# spikecycle matrix v1", 0) != 0)
    throw std::runtime_error("matrix csv: missing header line");
  {
    std::istringstream hs(line.substr(std::string("# spikecycle matrix v1").size()));
    std::string token;
    while (hs >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "n") n = std::stoi(value);
      else if (key == "p") p = std::stoi(value);
      else if (key == "seed") out.seed = std::stoull(value);
      else if (key == "hypothesis")
        out.provenance = value == "alternative" ? Hypothesis::kAlternative
                                                : Hypothesis::kNull;
    }
  }
  if (n < 1 || p < 1)
    throw std::runtime_error("matrix csv: header must carry n and p >= 1");
  out.values.resize(n, p);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("matrix csv: fewer rows than the header n");
    std::istringstream ls(line);
    std::string cell;
    for (int j = 0; j < p; ++j) {
      if (!std::getline(ls, cell, ','))
        throw std::runtime_error("matrix csv: short row");
      // strtod, not stod: stod throws on subnormals (ERANGE), which are
      // legitimate values and round trip through format_double.
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin || *end != '\0')
        throw std::runtime_error("matrix csv: cell is not a number");
      out.values(i, j) = value;
    }
  }
  return out;
}

DataMatrix load_matrix_csv(const std::string& path) {
  return matrix_from_csv_text(read_file(path));
}

}  // namespace spikecycle

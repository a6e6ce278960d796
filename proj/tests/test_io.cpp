#include "spikecycle/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "spikecycle/model.hpp"

using namespace spikecycle;
namespace fs = std::filesystem;

namespace {

std::uint64_t bits(double v) {
  std::uint64_t b = 0;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

DataMatrix awkward_matrix() {
  DataMatrix x;
  x.values.resize(3, 4);
  x.values << 1.0 / 3.0, -0.0, 1e-15, 1e308,
      -2.5, 0.1, 3.141592653589793, -1e-308,
      5e-324, 42.0, -0.75, 123456789.123456789;
  x.provenance = Hypothesis::kAlternative;
  x.seed = 987654321987654321ull;
  return x;
}

}  // namespace

TEST_CASE("atomic write replaces the target and leaves no temp file") {
  const std::string path = "io_atomic_test.txt";
  atomic_write_file(path, "first contents\n");
  CHECK(read_file(path) == "first contents\n");
  atomic_write_file(path, "second contents\n");
  CHECK(read_file(path) == "second contents\n");
  CHECK(!fs::exists(path + ".tmp-spikecycle"));
  fs::remove(path);

  // The temp file lives next to the target, not in the working directory.
  fs::create_directory("io_tmp_dir");
  atomic_write_file("io_tmp_dir/x.txt", "nested");
  CHECK(read_file("io_tmp_dir/x.txt") == "nested");
  CHECK(!fs::exists("io_tmp_dir/x.txt.tmp-spikecycle"));
  fs::remove_all("io_tmp_dir");
}

TEST_CASE("atomic write into a missing directory throws and creates nothing") {
  const std::string path = "no_such_dir_9c2/x.txt";
  CHECK_THROWS_WITH_AS(atomic_write_file(path, "payload"),
                       doctest::Contains("cannot open for writing"),
                       std::runtime_error);
  CHECK(!fs::exists(path));
  CHECK(!fs::exists(path + ".tmp-spikecycle"));
  CHECK(!fs::exists("no_such_dir_9c2"));
}

TEST_CASE("read_file round trips arbitrary bytes and rejects missing paths") {
  std::string content("line one\r\nline two\n", 19);
  content.push_back('\0');
  content += "after nul";
  atomic_write_file("io_bytes_test.bin", content);
  CHECK(read_file("io_bytes_test.bin") == content);
  fs::remove("io_bytes_test.bin");

  CHECK_THROWS_WITH_AS(read_file("definitely-missing-41be.txt"),
                       doctest::Contains("cannot open for reading"),
                       std::runtime_error);
}

TEST_CASE("format_double round trips doubles bitwise through strtod") {
  const double values[] = {0.0,
                           -0.0,
                           1.0,
                           -2.5,
                           1.0 / 3.0,
                           0.1,
                           3.141592653589793,
                           1e308,
                           -1e-308,
                           5e-324,  // smallest positive subnormal
                           std::numeric_limits<double>::max(),
                           std::numeric_limits<double>::min(),
                           std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
  for (double v : values) {
    const std::string s = format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    INFO(s);
    CHECK(bits(back) == bits(v));
  }
  // NaN round trips as a NaN, payload aside.
  const double nan_back = std::strtod(
      format_double(std::numeric_limits<double>::quiet_NaN()).c_str(),
      nullptr);
  CHECK(std::isnan(nan_back));
  // Signed zero keeps its sign through the text form.
  CHECK(format_double(-0.0)[0] == '-');
}

TEST_CASE("matrix csv round trips bitwise with header metadata") {
  const DataMatrix x = awkward_matrix();
  const std::string text = to_csv(x);
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(header ==
        "# spikecycle matrix v1 n=3 p=4 hypothesis=alternative "
        "seed=987654321987654321");

  const DataMatrix back = matrix_from_csv_text(text);
  CHECK(back.n() == x.n());
  CHECK(back.p() == x.p());
  CHECK(back.provenance == x.provenance);
  CHECK(back.seed == x.seed);
  for (int i = 0; i < x.n(); ++i)
    for (int j = 0; j < x.p(); ++j)
      CHECK(bits(back.values(i, j)) == bits(x.values(i, j)));
  // Canonical form: a second serialization reproduces the exact bytes.
  CHECK(to_csv(back) == text);

  DataMatrix null_draw;
  null_draw.values = Matrix::Zero(1, 1);
  const std::string null_text = to_csv(null_draw);
  CHECK(null_text.rfind("# spikecycle matrix v1 n=1 p=1 hypothesis=null "
                        "seed=0\n", 0) == 0);
}

TEST_CASE("matrix csv loader errors carry the reason") {
  CHECK_THROWS_WITH_AS(matrix_from_csv_text(""),
                       doctest::Contains("missing header line"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(matrix_from_csv_text("not a header\n1,2\n"),
                       doctest::Contains("missing header line"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(
      matrix_from_csv_text("# spikecycle matrix v1 hypothesis=null\n1\n"),
      doctest::Contains("header must carry n and p >= 1"),
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      matrix_from_csv_text("# spikecycle matrix v1 n=0 p=3\n"),
      doctest::Contains("header must carry n and p >= 1"),
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      matrix_from_csv_text("# spikecycle matrix v1 n=2 p=2\n1,2\n"),
      doctest::Contains("fewer rows than the header n"),
      std::runtime_error);
  CHECK_THROWS_WITH_AS(
      matrix_from_csv_text("# spikecycle matrix v1 n=1 p=3\n1,2\n"),
      doctest::Contains("short row"), std::runtime_error);
  // A cell that is not a number still surfaces as an exception.
  CHECK_THROWS_AS(
      matrix_from_csv_text("# spikecycle matrix v1 n=1 p=2\n1,abc\n"),
      std::exception);
}

TEST_CASE("header tokens without an equals sign are ignored") {
  const DataMatrix x = matrix_from_csv_text(
      "# spikecycle matrix v1 provenance n=1 p=1 foo=bar seed=7\n3.5\n");
  CHECK(x.n() == 1);
  CHECK(x.p() == 1);
  CHECK(x.seed == 7);
  CHECK(x.values(0, 0) == 3.5);
}

TEST_CASE("load_matrix_csv reads what to_csv wrote") {
  const DataMatrix x = awkward_matrix();
  atomic_write_file("io_matrix_test.csv", to_csv(x));
  const DataMatrix back = load_matrix_csv("io_matrix_test.csv");
  fs::remove("io_matrix_test.csv");
  CHECK(back.seed == x.seed);
  CHECK(back.provenance == x.provenance);
  REQUIRE(back.n() == x.n());
  REQUIRE(back.p() == x.p());
  for (int i = 0; i < x.n(); ++i)
    for (int j = 0; j < x.p(); ++j)
      CHECK(bits(back.values(i, j)) == bits(x.values(i, j)));

  CHECK_THROWS_AS(load_matrix_csv("definitely-missing-b10c.csv"),
                  std::runtime_error);
}

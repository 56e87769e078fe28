#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "geoflow/io.hpp"

using namespace geoflow;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("doubles round-trip through their printed form", "[io]") {
  for (double v : {1.0 / 3.0, 0.1, -2.5e-17, 1e300, 0.0, 6.02e23,
                   -0.3333333333333333, 1.0000000000000002}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv fields are quoted only when needed", "[io]") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("0.25") == "0.25");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("csv documents use crlf rows under a header", "[io]") {
  std::string doc = csv_document({"t", "x"}, {{"0", "1.5"}, {"0.1", "2"}});
  CHECK(doc == "t,x\r\n0,1.5\r\n0.1,2\r\n");
  CHECK_THROWS_AS(csv_document({"t", "x"}, {{"0"}}), std::runtime_error);
}

TEST_CASE("atomic writes land complete and overwrite cleanly", "[io]") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "geoflow-io-test";
  fs::remove_all(dir);
  fs::path target = dir / "nested" / "report.csv";

  write_text_atomic(target, "first\r\n");
  CHECK(slurp(target) == "first\r\n");

  write_text_atomic(target, "second,longer\r\ncontent\r\n");
  CHECK(slurp(target) == "second,longer\r\ncontent\r\n");

  // no stray temp files left behind
  int entries = 0;
  for (auto& e : fs::directory_iterator(target.parent_path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
  fs::remove_all(dir);
}

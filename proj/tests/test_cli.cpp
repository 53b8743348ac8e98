#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "eitsim_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run eitsim(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const std::string cmd = std::string(EITSIM_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  return r;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::vector<std::vector<double>> numeric_rows(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(eitsim("--help").status == 0);
  CHECK(eitsim("").status == 2);
  CHECK(eitsim("suppress --scheme nope").status == 2);
  CHECK(eitsim("suppress --scheme toy3 --intensities 1:2").status == 2);
  CHECK(eitsim("budget --error 1e-4 --shells 3").status == 2);
  CHECK(eitsim("run --config /nonexistent/run.json").status == 2);
  CHECK(eitsim("suppress --bogus-flag 1").status == 2);

  // A detection beam switched off leaves R without a denominator.
  write(scratch() / "dark.json", R"({"base": "toy3", "detection": {"intensity_W_cm2": 0}})");
  CHECK(eitsim("suppress --scheme " + (scratch() / "dark.json").string() + " --intensities 10").status == 3);
}

TEST_CASE("budget summary") {
  const auto r = eitsim("budget --error 1e-4");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("atoms: 125\n") != std::string::npos);
  CHECK(eitsim("budget --error 1e-3").out.find("atoms: 157464\n") != std::string::npos);
}

TEST_CASE("toy3 suppression CSV: layout and 1/I slope") {
  const auto r = eitsim("suppress --scheme toy3 --intensities 1:1e4:25log");
  REQUIRE(r.status == 0);
  std::istringstream in(r.out);
  std::string comment, header;
  std::getline(in, comment);
  std::getline(in, header);
  CHECK(comment.rfind("# {", 0) == 0);
  CHECK(comment.find("\"experiment\":\"suppress\"") != std::string::npos);
  CHECK(header.rfind("intensity_W_cm2,R,", 0) == 0);

  const auto rows = numeric_rows(r.out);
  REQUIRE(rows.size() == 25);
  std::vector<double> x, y;
  for (const auto& row : rows) {
    x.push_back(row[0]);
    y.push_back(row[1]);
  }
  CHECK(oracle::loglog_slope(x, y) == doctest::Approx(-1.0).epsilon(0.01));
}

TEST_CASE("output is byte-identical across thread counts and runs") {
  const std::string base = "suppress --scheme toy4 --intensities 10,300,3000 -o ";
  const auto a = scratch() / "t1.csv", b = scratch() / "t2.csv", c = scratch() / "t2b.csv";
  REQUIRE(eitsim(base + a.string() + " --threads 1").status == 0);
  REQUIRE(eitsim(base + b.string() + " --threads 2").status == 0);
  REQUIRE(eitsim(base + c.string() + " --threads 2").status == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(b) == slurp(c));
  CHECK(!slurp(a).empty());

  const std::string map = "dressed-map --scheme scheme1 --detunings -50:50:5 --intensities 1:1e3:4log -o ";
  REQUIRE(eitsim(map + a.string() + " --threads 1").status == 0);
  REQUIRE(eitsim(map + b.string() + " --threads 2").status == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("run configs") {
  const auto dir = scratch();
  write(dir / "toy.json", R"({"base": "toy3", "name": "toy3-file"})");
  write(dir / "run.json", R"({"experiment": "suppress", "scheme": "toy.json",
                              "intensities": [10, 100], "o": ")" + (dir / "run.csv").string() + "\"}");
  REQUIRE(eitsim("run --config " + (dir / "run.json").string()).status == 0);
  const auto csv = slurp(dir / "run.csv");
  CHECK(csv.find("toy3-file") != std::string::npos);
  CHECK(numeric_rows(csv).size() == 2);

  const auto direct = eitsim("suppress --scheme " + (dir / "toy.json").string() + " --intensities 10,100");
  CHECK(numeric_rows(direct.out) == numeric_rows(csv));

  write(dir / "missing.json", R"({"experiment": "suppress", "scheme": "absent.json", "o": ")" +
                                  (dir / "missing.csv").string() + "\"}");
  CHECK(eitsim("run --config " + (dir / "missing.json").string()).status == 2);
  CHECK_FALSE(fs::exists(dir / "missing.csv"));

  write(dir / "nested.json", R"({"experiment": "run", "config": "run.json"})");
  CHECK(eitsim("run --config " + (dir / "nested.json").string()).status == 2);
}

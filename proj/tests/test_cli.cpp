#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "levelflow/cli.hpp"
#include "levelflow/errors.hpp"
#include "levelflow/io.hpp"
#include "levelflow/verification.hpp"

using namespace levelflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "levelflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command_line(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "levelflow_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("format_real round-trips doubles") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> exponent(-300.0, 300.0);
  for (int i = 0; i < 10'000; ++i) {
    const double x = std::pow(10.0, exponent(rng)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::strtod(format_real(x).c_str(), nullptr) == x);
  }
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.5) == "1.5");
}

TEST_CASE("CsvWriter") {
  std::ostringstream out;
  const std::string_view header[] = {"a", "b"};
  CsvWriter csv(out, header);
  csv.row({1.0, 0.25});
  CHECK(out.str() == "a,b\n1,0.25\n");
  CHECK_THROWS_AS(csv.row({1.0}), ConfigError);
}

TEST_CASE("level files") {
  std::istringstream good("# header\n\n0.5\n  1.25  \n#2\n3e0\r\n");
  CHECK(read_levels(good) == std::vector<double>{0.5, 1.25, 3.0});

  std::istringstream bad("1\n2\nthree\n");
  CHECK_THROWS_WITH_AS(read_levels(bad), doctest::Contains("line 3"), ConfigError);
  std::istringstream trailing("1\n2 3\n");
  CHECK_THROWS_AS(read_levels(trailing), ConfigError);
  std::istringstream nan("nan\n");
  CHECK_THROWS_AS(read_levels(nan), ConfigError);
  CHECK_THROWS_AS(read_levels_file("/nonexistent/levels.txt"), ConfigError);

  const std::vector<double> values = {0.0, 0.1, 1.0 / 3.0, 2.718281828459045};
  std::stringstream io;
  write_levels(io, values, "two\nlines");
  CHECK(io.str().rfind("# two\n# lines\n", 0) == 0);
  CHECK(read_levels(io) == values);
}

TEST_CASE("fit report schema") {
  FamilyFit fit{3.0, 1.0, -10.5, 200, true};
  KsResult ks{0.01, 0.1, true, true};
  const auto j = fit_report(fit, ks);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"n_hat", "scale_hat", "log_likelihood", "ks_statistic", "ks_pass",
                                         "sample_size"});
  CHECK(j["ks_pass"].get<bool>());
  CHECK(j["sample_size"].get<std::size_t>() == 200);
}

TEST_CASE("spectrum command") {
  const auto r = cli({"spectrum", "--beta", "2", "--levels", "3"});
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = parse_csv(r.out, &header);
  CHECK(header == "n,numeric,exact,difference");
  REQUIRE(rows.size() == 3);
  const double expected[] = {1.5, 3.5, 5.5};
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(rows[k][0] == static_cast<double>(k));
    CHECK(std::abs(rows[k][1] - expected[k]) < 1e-3);
    CHECK(rows[k][2] == expected[k]);
  }
  const auto j = nlohmann::json::parse(cli({"spectrum", "--beta", "4", "--levels", "2", "--format", "json"}).out);
  CHECK(std::abs(j["levels"][0]["numeric"].get<double>() - 2.5) < 1e-3);
}

TEST_CASE("ladder and fit commands") {
  const auto path = scratch("ladder_n3.txt");
  const auto made = cli({"ladder", "--family", "3", "--seed", "21", "--count", "100000", "-o", path.string()});
  REQUIRE(made.code == 0);
  CHECK(made.out.empty());
  const auto levels = read_levels_file(path.string());
  CHECK(levels.size() == 100'001);

  const auto fitted = cli({"fit", "--input", path.string()});
  REQUIRE(fitted.code == 0);
  const auto j = nlohmann::json::parse(fitted.out);
  CHECK(std::abs(j["n_hat"].get<double>() - 3.0) < 0.1);
  CHECK(j["ks_pass"].get<bool>());
  CHECK(j["sample_size"].get<std::size_t>() == 100'000);
  CHECK(j["spacings"] == "normalized, not unfolded");

  const auto as_csv = cli({"fit", "--input", path.string(), "--format", "csv"});
  CHECK(as_csv.out.rfind("n_hat,scale_hat,log_likelihood,ks_statistic,ks_pass,sample_size\n", 0) == 0);
}

TEST_CASE("identical options give byte-identical output") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"simulate", "--family", "3", "--paths", "16", "--steps", "100", "--seed", "5"},
        std::vector<std::string>{"oracle-2x2", "--count", "5000", "--seed", "5"},
        std::vector<std::string>{"ladder", "--family", "2.5", "--count", "5000", "--seed", "5", "--format", "json"},
        std::vector<std::string>{"kernel", "--family", "4", "--lags", "0.5,2", "--starts", "0,1", "--points", "11"}}) {
    const auto a = cli(args);
    const auto b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }
  const auto one = cli({"simulate", "--family", "3", "--paths", "4", "--steps", "10", "--seed", "1"});
  const auto two = cli({"simulate", "--family", "3", "--paths", "4", "--steps", "10", "--seed", "2"});
  CHECK(one.out != two.out);
}

TEST_CASE("simulate output layout") {
  const auto r = cli({"simulate", "--family", "3", "--paths", "3", "--steps", "10", "--dt", "0.01", "--stride", "5",
                      "--x0", "2"});
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = parse_csv(r.out, &header);
  CHECK(header == "path,time,value");
  REQUIRE(rows.size() == 9);  // steps 0, 5, 10 for each of 3 paths
  CHECK(rows[0][1] == 0.0);
  CHECK(rows[0][2] == 2.0);
  CHECK(std::abs(rows[2][1] - 0.1) < 1e-15);
  CHECK(rows[8][0] == 2.0);
  for (const auto& row : rows) CHECK(row[2] > 0.0);
}

TEST_CASE("kernel and fp-evolve output") {
  const auto k = cli({"kernel", "--family", "3", "--lags", "20", "--starts", "1", "--points", "7"});
  REQUIRE(k.code == 0);
  const auto rows = parse_csv(k.out);
  REQUIRE(rows.size() == 7);
  for (const auto& row : rows) {
    const double x = row[2];
    CHECK(std::abs(row[3] - 4.0 / std::sqrt(M_PI) * x * x * std::exp(-x * x)) < 1e-9);
  }

  const auto fp = cli({"fp-evolve", "--family", "3", "--cells", "1000", "--times", "0.5,2,8", "--implicit",
                       "--format", "json"});
  REQUIRE(fp.code == 0);
  const auto j = nlohmann::json::parse(fp.out);
  REQUIRE(j["snapshots"].size() == 4);
  double prev = INFINITY;
  for (const auto& snap : j["snapshots"]) {
    const double l1 = snap["l1_to_invariant"].get<double>();
    CHECK(l1 < prev);
    prev = l1;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("verify command") {
  const auto r = cli({"verify", "--family", "3", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("0 failed") != std::string::npos);
  const auto j = nlohmann::json::parse(cli({"verify", "--family", "2", "--seed", "7", "--format", "json"}).out);
  CHECK(j["checks"].size() == 18);
  for (const auto& c : j["checks"]) CHECK(c["status"] != "fail");
}

TEST_CASE("report bookkeeping") {
  VerificationReport r{3.0, 1, {}};
  r.checks.push_back({"m", "a", 1.0, 2.0, true, false, "", 0.0});
  r.checks.push_back({"m", "b", 0.0, 0.0, false, true, "n/a", 0.0});
  CHECK(r.all_passed());
  r.checks.push_back({"m", "c", 3.0, 2.0, false, false, "", 0.0});
  CHECK(r.failures() == 1);
  std::ostringstream out;
  print_report(out, r);
  CHECK(out.str().find("FAIL  m") != std::string::npos);
  CHECK(out.str().find("SKIP  m") != std::string::npos);
  CHECK(out.str().find("3 checks, 1 failed") != std::string::npos);
}

TEST_CASE("failures exit with a diagnostic naming the operation") {
  const auto beta = cli({"spectrum", "--beta=-2"});
  CHECK(beta.code == 1);
  CHECK(beta.err == "levelflow: eigen_solve: beta must be > -1\n");

  const auto family = cli({"simulate", "--family", "1"});
  CHECK(family.code == 1);
  CHECK(family.err.find("RepulsionFamily:") != std::string::npos);

  const auto dt = cli({"simulate", "--family", "3", "--dt", "0.5"});
  CHECK(dt.code == 1);
  CHECK(dt.err.find("levelflow: simulate_path:") == 0);

  const auto missing = cli({"fit", "--input", "/nonexistent/levels.txt"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("read_levels:") != std::string::npos);

  const auto unsorted_path = scratch("unsorted.txt");
  std::ofstream(unsorted_path) << "0\n1\n0.5\n";
  const auto unsorted = cli({"fit", "--input", unsorted_path.string()});
  CHECK(unsorted.code == 1);
  CHECK(unsorted.err.find("spacings_from_levels: levels not strictly ascending at index 2") != std::string::npos);

  const auto few_path = scratch("few.txt");
  std::ofstream(few_path) << "0\n1\n2.5\n";
  const auto few = cli({"fit", "--input", few_path.string()});
  CHECK(few.code == 1);
  CHECK(few.err.find("mle_fit_family:") != std::string::npos);

  const auto grid = cli({"spectrum", "--step", "1e-9"});
  CHECK(grid.code == 1);
  CHECK(grid.err.find("eigen_solve:") != std::string::npos);

  const auto unwritable = cli({"spectrum", "-o", "/nonexistent/dir/out.csv"});
  CHECK(unwritable.code == 1);
  CHECK(unwritable.err.find("output:") != std::string::npos);

  CHECK(cli({}).code == 1);
  CHECK(cli({"bogus"}).code == 1);
  CHECK(cli({"simulate"}).code == 1);  // --family is required
  CHECK(cli({"spectrum", "--format", "xml"}).code == 1);

  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("oracle-2x2") != std::string::npos);
}

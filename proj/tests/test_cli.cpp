#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

const std::string kCli = HMMENT_CLI_PATH;
const std::string kData = HMMENT_EXAMPLES_DIR;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args, const std::string& env = "") {
  const auto err_path = std::filesystem::temp_directory_path() / "hmment_cli_stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + " 2>" + err_path.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string error_name(const Run& r) { return nlohmann::json::parse(r.err).at("error").get<std::string>(); }

}  // namespace

TEST_CASE("entropy of the iid uniform chain is log 2") {
  const Run r = run("entropy --pi 0.5,0.5,0.5,0.5 --eps 0.3 --n 8");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"n", "H_n"});
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::stod(rows[k][1]) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const Run bits = run("entropy --pi 0.5,0.5,0.5,0.5 --eps 0.3 --n 2 --bits");
  CHECK(std::stod(parse_csv(bits.out)[3][1]) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("lowsnr prints the closed form and the jet table") {
  const Run r = run("lowsnr --pi 0.6,0.4,0.3,0.7 --check-level 6");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  CHECK(rows[0][0] == "closed_form");
  CHECK(std::stod(rows[0][1]) == doctest::Approx(-4.0 / 49.0).epsilon(1e-15));
  CHECK(rows[1][0] == "n");
  REQUIRE(rows.size() == 9);
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][5]) < 1e-2);
}

TEST_CASE("bsc classify reports the witnesses") {
  const Run r = run("bsc classify --pi 0.7,0.3,0.4,0.6 --eps 0.02");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("class") == "CantorSet");
  CHECK(j.at("f1_p0").get<double>() < j.at("f0_p1").get<double>());
  CHECK(j.at("p1").get<double>() < j.at("p0").get<double>());
  CHECK(j.at("interval").size() == 2);

  const Run i = run("bsc classify --pi 0.95,0.05,0.05,0.95 --eps 0.2");
  CHECK(nlohmann::json::parse(i.out).at("class") == "Interval");
}

TEST_CASE("bounds, support and cylinder tables") {
  const Run b = run("bsc bounds --pi 0.7,0.3,0.4,0.6 --eps 0.05 --level 6");
  REQUIRE(b.code == 0);
  const auto rows = parse_csv(b.out);
  CHECK(rows[0] == std::vector<std::string>{"level", "lower", "upper", "width"});
  REQUIRE(rows.size() == 8);
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][3]) <= std::stod(rows[k - 1][3]) + 1e-12);

  const Run s = run("bsc support --pi 0.7,0.3,0.4,0.6 --eps 0.05 --level 3");
  REQUIRE(s.code == 0);
  CHECK(parse_csv(s.out).size() == 1 + 16);

  const Run c = run("bsc cylinder --pi 0.7,0.3,0.4,0.6 --eps 0.05 --level 4");
  REQUIRE(c.code == 0);
  const auto cyl = parse_csv(c.out);
  REQUIRE(cyl.size() == 17);
  double total = 0;
  for (std::size_t k = 1; k < cyl.size(); ++k) {
    CHECK(cyl[k][0].size() == 4);
    total += std::stod(cyl[k][2]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hpz writes a JSON breakdown") {
  const auto path = std::filesystem::temp_directory_path() / "hmment_hpz.json";
  const Run r = run("hpz --pi 0.7,0.3,0.4,0.6 --eps 0.05 --level 10 --quad 2049 --reference 12 --json " + path.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  for (const char* key : {"term1", "term2", "term3", "term4", "endpoint_correction", "total", "reference"}) {
    CHECK(j.contains(key));
  }
  CHECK(std::abs(j.at("total").get<double>() - j.at("reference").get<double>()) < 5e-3);
  std::filesystem::remove(path);

  CHECK(run("hpz --pi 0.7,0.3,0.4,0.6 --eps 0.05 --level 8 --quad 4096").code == 2);
}

TEST_CASE("coefficients") {
  const Run csv = run("coeffs --order 2");
  REQUIRE(csv.code == 0);
  const auto rows = parse_csv(csv.out);
  CHECK(rows[0] == std::vector<std::string>{"partition", "C"});
  CHECK(rows.size() == 4);
  const Run js = run("coeffs --order 2 --format json");
  const auto j = nlohmann::json::parse(js.out);
  REQUIRE(j.size() == 3);
  CHECK(j[1].at("C") == "-3");
}

TEST_CASE("model and curve files") {
  const Run m = run("entropy --model " + kData + "/markov3.json --n 5");
  REQUIRE(m.code == 0);
  const auto rows = parse_csv(m.out);
  for (std::size_t k = 3; k < rows.size(); ++k) CHECK(std::stod(rows[k][1]) == doctest::Approx(std::stod(rows[2][1])).epsilon(1e-14));

  const Run d = run("derivative --model-curve " + kData + "/bsc_curve.json --at 0 --order 2");
  REQUIRE(d.code == 0);
  const Run dp = run("derivative --pi 0.7,0.3,0.4,0.6 --at 0 --order 2");
  CHECK(d.out == dp.out);

  const Run bh = run("derivative --model-curve " + kData + "/markov3_curve.json --at 0 --order 1");
  CHECK(bh.code == 4);
  CHECK(error_name(bh) == "NotABlackHole");
}

TEST_CASE("exit codes and structured errors") {
  const Run usage = run("entropy --pi 1,2 --eps 0.1");
  CHECK(usage.code == 2);
  CHECK(error_name(usage) == "InvalidModel");

  const Run parse = run("nonsense");
  CHECK(parse.code == 2);
  CHECK(error_name(parse) == "UsageError");

  const Run guard = run("entropy --pi 0.7,0.3,0.4,0.6 --eps 0.1 --n 30");
  CHECK(guard.code == 3);
  CHECK(error_name(guard) == "EnumerationTooLarge");

  const Run regime = run("bsc bounds --pi 0.95,0.05,0.05,0.95 --eps 0.2 --level 3");
  CHECK(regime.code == 4);
  CHECK(error_name(regime) == "NotNonOverlapping");
  CHECK(regime.out.empty());

  const Run missing = run("entropy --model /nonexistent/model.json --n 2");
  CHECK(missing.code == 2);
}

TEST_CASE("sweep: mirror column and bracketing") {
  const Run r = run("sweep --pi 0.8,0.2,0.2,0.8 --n 8 --level 8 --points 5 --from 0.02 --to 0.3 --mirror");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"eps", "H_n", "lower", "upper", "class", "H_n_mirror"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double h = std::stod(rows[k][1]);
    CHECK(std::abs(h - std::stod(rows[k][5])) < 1e-12);
    if (rows[k][4] == "CantorSet") {
      CHECK(std::stod(rows[k][2]) <= h + 1e-12);
      CHECK(h <= std::stod(rows[k][3]) + 1e-12);
    }
  }
}

TEST_CASE("output is byte-identical across runs and worker counts") {
  const std::string args = "entropy --pi 0.7,0.3,0.4,0.6 --eps 0.1 --n 14";
  const Run one = run(args, "HMMENT_THREADS=1");
  REQUIRE(one.code == 0);
  CHECK(run(args, "HMMENT_THREADS=1").out == one.out);
  CHECK(run(args, "HMMENT_THREADS=3").out == one.out);
  CHECK(run(args, "HMMENT_THREADS=8").out == one.out);

  const std::string sw = "sweep --pi 0.7,0.3,0.4,0.6 --n 13 --level 10 --points 4 --from 0.01 --to 0.4";
  const Run s1 = run(sw, "HMMENT_THREADS=1");
  CHECK(run(sw, "HMMENT_THREADS=4").out == s1.out);

  // 17 significant digits round-trip exactly.
  for (const auto& row : parse_csv(one.out)) {
    if (row[0] == "n") continue;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", std::stod(row[1]));
    CHECK(row[1] == buf);
  }
}

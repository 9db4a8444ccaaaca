#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sklab/rs_core.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SKLAB_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
    r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("help exits 0, unknown arguments exit 2") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("fixed-point --no-such-flag").exit_code == 2);
  CHECK(run("").exit_code == 2);             // a subcommand is required
  CHECK(run("fixed-point --beta -3 --h 0.5").exit_code == 2);
}

TEST_CASE("fixed-point CSV round-trips through the library") {
  const RunResult r = run("fixed-point --beta 1.2 --h 0.5");
  REQUIRE(r.exit_code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(split(rows[0])[2] == "q");
  const auto cells = split(rows[1]);
  const sklab::RSFixedPoint fp = sklab::solve_q({1.2, 0.5});
  CHECK(std::fabs(std::stod(cells[2]) - fp.q) < 1e-15);
  CHECK(std::fabs(std::stod(cells[3]) - fp.alpha) < 1e-15);
}

TEST_CASE("fixed-point sweeps emit one row per grid point") {
  const RunResult r =
      run("fixed-point --beta 0.5 --beta-max 2.0 --beta-steps 4 --h 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK(lines(r.out).size() == 5);  // header + 4
}

TEST_CASE("json output is selectable") {
  const RunResult r = run("--format json fixed-point --beta 1.2 --h 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("\"q\"") != std::string::npos);
}

TEST_CASE("at-line rows all sit on the boundary") {
  const RunResult r = run("at-line --beta-min 1.2 --beta-max 1.6 --steps 3");
  REQUIRE(r.exit_code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = split(rows[i]);
    const double beta = std::stod(c[0]), h = std::stod(c[1]);
    CHECK(std::fabs(sklab::solve_q({beta, h}).alpha - 1.0) < 1e-8);
  }
}

TEST_CASE("parisi-eval accepts explicit measures and rejects bad ones") {
  const RunResult ok = run(
      "parisi-eval --beta 1.2 --h 1.0 --atoms 0.3,0.6 --weights 0.5,0.5");
  CHECK(ok.exit_code == 0);
  const RunResult bad = run(
      "parisi-eval --beta 1.2 --h 1.0 --atoms 0.6,0.3 --weights 0.5,0.5");
  CHECK(bad.exit_code == 3);  // numerical-domain error, not a usage error
}

TEST_CASE("sk-enum is reproducible for a fixed seed") {
  const std::string args = "sk-enum --beta 1 --h 1 --n 6 --samples 20 --seed 7";
  const RunResult a = run(args), b = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const RunResult c =
      run("sk-enum --beta 1 --h 1 --n 6 --samples 20 --seed 8");
  CHECK(c.out != a.out);
}

TEST_CASE("verify-lemmas exit code tracks the report") {
  CHECK(run("verify-lemmas").exit_code == 0);
  // absurdly tightened tolerances must fail and exit 1
  CHECK(run("verify-lemmas --tolerance-scale 1e-12").exit_code == 1);
}

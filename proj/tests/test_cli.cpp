#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "zeroinv/potential_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "zeroinv_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(ZEROINV_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("trace --potential no-such-type") == 4);
  CHECK(run("trace") == 4);
  CHECK(run("verify --suite no-such-suite --out " + (work / "x").string()) == 4);
  // no second s-wave zero below E = 0 with a single bound state
  CHECK(run("trace --potential bargmann --gamma2 10 --n 2 --e0 -5 --e-max 20 --out " +
            (work / "y").string()) == 4);
}

TEST_CASE("trace then invert reproduces the two-step potential") {
  fs::remove_all(work / "t");
  REQUIRE(run("trace --potential two-step --n 1 --dr 0.0025 --out " + (work / "t").string()) == 0);
  REQUIRE(run("invert-piecewise --line " + (work / "t" / "line_n1.csv").string() + " --out " +
              (work / "i").string()) == 0);
  const auto p = zeroinv::read_potential_file((work / "i" / "potential.txt").string());
  CHECK(p(1.0) == doctest::Approx(-2.0).epsilon(1e-4));
  CHECK(p(2.5) == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(p(3.5) == 0.0);
  const auto jumps = slurp(work / "i" / "jumps.csv");
  CHECK(jumps.find("# command=invert-piecewise") != std::string::npos);
  CHECK(jumps.find("a,jump3,slope,deltaV,confidence") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs and carry their parameters") {
  REQUIRE(run("fig2 --gnuplot --out " + (work / "a").string()) == 0);
  REQUIRE(run("fig2 --gnuplot --out " + (work / "b").string()) == 0);
  const auto a = slurp(work / "a" / "fig2.csv");
  CHECK(a == slurp(work / "b" / "fig2.csv"));
  CHECK(a.find("# dr=0.0025") != std::string::npos);
  CHECK(a.find("# potential=type=piecewise;breakpoints=2,3;values=-2,-1") != std::string::npos);
  CHECK(fs::exists(work / "a" / "fig2.gp"));
  REQUIRE(run("verify --suite distinguishability --count 3 --seed 5 --out " + (work / "v").string()) == 0);
  const auto v = slurp(work / "v" / "verify_distinguishability.txt");
  CHECK(v.find("# seed=5") != std::string::npos);
  CHECK(v.find("passed=true") != std::string::npos);
}

TEST_CASE("forward: zero potential has vanishing phase shifts, Born column on request") {
  REQUIRE(run("forward --potential zero --out " + (work / "f").string()) == 0);
  std::istringstream in(slurp(work / "f" / "phase_shifts.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
    CHECK(zeroinv::parse_number(line.substr(line.find(',') + 1)) == 0.0);
    ++rows;
  }
  CHECK(rows > 10);
  REQUIRE(run("forward --potential exponential --v0 -0.5 --mu 1 --born --out " + (work / "g").string()) == 0);
  CHECK(slurp(work / "g" / "phase_shifts.csv").find("k,delta,delta_born") != std::string::npos);
}

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "commands.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "doctest.h"

using namespace sdosm;
using namespace sdosm::cli;

namespace {

ParseResult parse(std::vector<std::string> args) {
  args.insert(args.begin(), "sdosm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_command_line(static_cast<int>(argv.size()), argv.data());
}

// Runs the installed front end and returns its exit status.
int run_exe(const std::string& args) {
  const std::string cmd = std::string(SDOSM_EXE) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string capture(const RunConfig& c, int* code = nullptr) {
  std::ostringstream out, err;
  const int rc = dispatch(c, out, err);
  if (code) *code = rc;
  return out.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string column(const std::vector<std::vector<std::string>>& rows, std::size_t r, const std::string& name) {
  for (std::size_t i = 0; i < rows[0].size(); ++i)
    if (rows[0][i] == name) return rows[r][i];
  FAIL("missing column " << name);
  return {};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parsing") {
  SUBCASE("optimize flags") {
    const ParseResult r = parse({"optimize", "--test-case", "D", "--theta", "0.5", "--dt", "0.005", "--h", "0.0625",
                                 "--gamma", "1", "--include-zero"});
    REQUIRE(r.config);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.config->command == Command::Optimize);
    CHECK(r.config->test_case == TestCase::D);
    CHECK(*r.config->theta == 0.5);
    CHECK(r.config->include_zero);
  }
  SUBCASE("run flags and overrides") {
    const ParseResult r = parse({"run", "--scenario", "lid", "--dt", "0.0625", "--level", "2", "--coupling",
                                 "monolithic", "--mu-f", "3", "--snapshot", "0.25,0.75", "--convention", "effective"});
    REQUIRE(r.config);
    CHECK(r.config->scenario == timeloop::ScenarioKind::LidFiltration);
    CHECK(r.config->level == 2);
    CHECK(*r.config->coupling == timeloop::Coupling::Monolithic);
    CHECK(r.config->physical().mu_f == 3.0);
    CHECK(r.config->snapshots == std::vector<double>{0.25, 0.75});
    CHECK(r.config->scenario_for().convention == TimeFactorConvention::EffectiveThetaDt);
  }
  SUBCASE("usage errors") {
    CHECK(parse({"optimize", "--dt", "0.01"}).exit_code == kExitUsage);
    CHECK(parse({"run", "--dt", "0.01"}).exit_code == kExitUsage);
    CHECK(parse({"run", "--scenario", "manufactured"}).exit_code == kExitUsage);
    CHECK(parse({"run", "--scenario", "nowhere", "--dt", "0.1"}).exit_code == kExitUsage);
    CHECK(parse({"optimize", "--dt", "-1", "--h", "0.1"}).exit_code == kExitUsage);
    CHECK(parse({"optimize", "--dt", "0.1", "--h", "0.1", "--theta", "2"}).exit_code == kExitUsage);
    CHECK(parse({"run", "--scenario", "manufactured", "--dt", "0.1", "--alpha-f", "3"}).exit_code == kExitUsage);
    CHECK(parse({"frobnicate"}).exit_code == kExitUsage);
    CHECK(parse({}).exit_code == kExitUsage);
    CHECK(parse({"optimize", "--dt", "0.1", "--h", "0.1", "--bogus", "1"}).exit_code == kExitUsage);
  }
  SUBCASE("configuration file") {
    const std::string path = "test_cli_config.ini";
    {
      std::ofstream f(path);
      f << "# settings\ntest-case = B\ndt = 0.05\nh = 0.1\ngamma = 0.5\n";
    }
    const ParseResult r = parse({"optimize", "--config", path, "--dt", "0.01"});
    REQUIRE(r.config);
    CHECK(r.config->test_case == TestCase::B);
    CHECK(*r.config->dt == 0.01);
    CHECK(*r.config->h == 0.1);
    {
      std::ofstream f(path);
      f << "unknown-key = 3\n";
    }
    CHECK(parse({"optimize", "--config", path, "--dt", "0.01", "--h", "0.1"}).exit_code == kExitUsage);
    std::filesystem::remove(path);
  }
}

TEST_CASE("optimize output") {
  const ParseResult r = parse({"optimize", "--test-case", "A", "--theta", "1", "--dt", "0.01", "--h", "0.1", "--gamma", "0.5"});
  REQUIRE(r.config);
  int code = -1;
  const std::string text = capture(*r.config, &code);
  CHECK(code == kExitOk);
  CHECK(text.rfind("# command=optimize", 0) == 0);
  const auto rows = csv_rows(text);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(column(rows, 1, "alpha_p")) == doctest::Approx(105.0).epsilon(0.005));
  CHECK(column(rows, 1, "solver") == "TheoremSolver");
  CHECK(std::stod(column(rows, 1, "rho_max")) < 1.0);

  const ParseResult z = parse({"optimize", "--test-case", "D", "--theta", "0.5", "--dt", "0.005", "--h", "0.0625",
                               "--gamma", "1", "--include-zero"});
  const auto zr = csv_rows(capture(*z.config));
  CHECK(std::stod(column(zr, 1, "alpha_p")) == doctest::Approx(29.8).epsilon(0.002));
  CHECK(column(zr, 1, "solver") == "NumericSolver");
}

TEST_CASE("run output") {
  SUBCASE("summary and reproducibility") {
    const ParseResult r = parse({"run", "--scenario", "manufactured", "--test-case", "B", "--dt", "0.1"});
    REQUIRE(r.config);
    int code = -1;
    const std::string a = capture(*r.config, &code);
    CHECK(code == kExitOk);
    CHECK(a == capture(*r.config));
    const auto rows = csv_rows(a);
    REQUIRE(rows.size() == 2);
    CHECK(column(rows, 1, "steps") == "5");
    CHECK(column(rows, 1, "completed") == "1");
    CHECK(std::stod(column(rows, 1, "avg_iter_tn")) <= std::stod(column(rows, 1, "iter_t1")));
    CHECK(column(rows, 1, "mesh") == "h1");
  }
  SUBCASE("periodic zero data") {
    const ParseResult r = parse({"run", "--scenario", "periodic", "--test-case", "A", "--dt", "0.01", "--zero-guess"});
    REQUIRE(r.config);
    const auto rows = csv_rows(capture(*r.config));
    CHECK(column(rows, 1, "iter_t1") == "0");
    CHECK(column(rows, 1, "completed") == "1");
  }
  SUBCASE("files and plot data") {
    const std::string prefix = "test_cli_lid";
    const ParseResult r = parse({"run", "--scenario", "lid", "--test-case", "D", "--dt", "0.25", "-o", prefix});
    REQUIRE(r.config);
    int code = -1;
    capture(*r.config, &code);
    CHECK(code == kExitOk);
    const auto steps = csv_rows(slurp(prefix + "_steps.csv"));
    CHECK(steps.size() == 5);
    CHECK(csv_rows(slurp(prefix + "_summary.csv")).size() == 2);
    const std::string pressure = slurp(prefix + "_pressure_t0.7500.dat");
    const std::string velocity = slurp(prefix + "_velocity_t0.7500.dat");
    CHECK_FALSE(pressure.empty());
    CHECK_FALSE(velocity.empty());
    std::istringstream ps(pressure);
    std::string line;
    while (std::getline(ps, line) && (line.empty() || line[0] == '#')) {
    }
    std::istringstream ls(line);
    double x, y, p;
    ls >> x >> y >> p;
    CHECK(ls);
    for (const char* suffix : {"_steps.csv", "_summary.csv", "_pressure_t0.7500.dat", "_velocity_t0.7500.dat"})
      std::filesystem::remove(prefix + suffix);
  }
}

TEST_CASE("sweep-s output") {
  SUBCASE("single point at s*") {
    const ParseResult r = parse({"sweep-s", "--scenario", "periodic", "--test-case", "A", "--dt", "0.01", "--points", "1"});
    REQUIRE(r.config);
    const auto rows = csv_rows(capture(*r.config));
    REQUIRE(rows.size() == 2);
    CHECK(column(rows, 1, "optimal") == "1");
    CHECK_FALSE(column(rows, 1, "iterations").empty());
  }
  SUBCASE("predicted factor is smallest at s*") {
    const ParseResult r = parse({"sweep-s", "--scenario", "periodic", "--test-case", "C", "--dt", "0.01", "--points", "7"});
    REQUIRE(r.config);
    const auto rows = csv_rows(capture(*r.config));
    REQUIRE(rows.size() == 8);
    std::size_t best = 0, marked = 0;
    double best_rho = 1e300;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double rho = std::stod(column(rows, i, "predicted_rho_max"));
      if (rho < best_rho) {
        best_rho = rho;
        best = i;
      }
      if (column(rows, i, "optimal") == "1") marked = i;
    }
    CHECK(marked == 4);
    CHECK(best == marked);
  }
  const auto odd = s_grid(2.0, 4.0, 3);
  REQUIRE(odd.size() == 3);
  CHECK(odd[0] == doctest::Approx(0.5));
  CHECK(odd[1] == 2.0);
  CHECK(odd[2] == doctest::Approx(8.0));
  const auto even = s_grid(2.0, 4.0, 4);
  CHECK(even.size() == 4);
  CHECK(std::count(even.begin(), even.end(), 2.0) == 1);
  CHECK(std::is_sorted(even.begin(), even.end()));
}

TEST_CASE("helpers") {
  CHECK(std::isnan(average_later_iterations({ddm::IterationReport{}})));
  std::vector<ddm::IterationReport> reps(3);
  reps[0].iterations = 9;
  reps[1].iterations = 2;
  reps[2].iterations = 3;
  CHECK(average_later_iterations(reps) == doctest::Approx(2.5));
  CHECK(num(1.0 / 3.0) == "0.333333");
  CHECK(num(1e-20) == "1e-20");
  CHECK(num(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("dump-mesh") {
  const ParseResult r = parse({"dump-mesh", "--scenario", "manufactured", "--level", "2"});
  REQUIRE(r.config);
  const std::string text = capture(*r.config);
  CHECK(text.rfind("# nodes 231", 0) == 0);
  CHECK(text.find("# cells 200") != std::string::npos);
}

TEST_CASE("process exit codes") {
  CHECK(run_exe("optimize --test-case A --dt 0.01 --h 0.1 --gamma 0.5") == kExitOk);
  CHECK(run_exe("optimize --test-case A --dt 0.01 --h 0.1 --include-zero --S-p 1e-300") == kExitOptimizer);
  CHECK(run_exe("run --scenario manufactured --dt 0.1 --max-iter 1") == kExitNotConverged);
  CHECK(run_exe("optimize --dt 0.01") == kExitUsage);
  CHECK(run_exe("--help") == kExitOk);
}

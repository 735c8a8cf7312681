#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdosm/params.hpp"
#include "sdosm/scenario.hpp"

namespace sdosm::cli {

enum class Command { Optimize, Run, SweepS, DumpMesh };
std::string to_string(Command c);

// Resolved settings of one invocation. Optional fields fall back to the scenario defaults.
struct RunConfig {
  Command command = Command::Run;
  timeloop::ScenarioKind scenario = timeloop::ScenarioKind::ManufacturedSolution;
  TestCase test_case = TestCase::A;

  // Overrides of the dimensionless coefficients of the test case.
  std::optional<double> mu_f, eta1, eta2, S_p, xi_f;

  std::optional<double> theta;
  std::optional<double> dt;
  std::optional<double> t_final;
  int level = 1;
  int nx = 0;
  std::optional<int> grading_layers;
  std::optional<double> grading_ratio;

  // optimize only: explicit discretization instead of a scenario mesh
  std::optional<double> h;
  double gamma = 1.0;
  bool include_zero = false;
  std::optional<double> zero_depth;

  std::optional<timeloop::Coupling> coupling;
  double tol = 1e-8;
  int max_iter = 500;
  std::optional<double> band_multiplier;
  std::optional<TimeFactorConvention> convention;
  std::optional<double> alpha_f, alpha_p;  // manual Robin pair
  std::optional<std::uint64_t> seed;
  bool zero_guess = false;
  std::vector<double> snapshots;

  int sweep_points = 15;
  double sweep_factor = 3.0;  // grid spans [s*/f, f s*]

  std::string output;  // file (optimize, dump-mesh) or prefix (run, sweep-s); empty = stdout
  bool timings = false;

  void validate() const;
  // Scenario with every override applied.
  timeloop::Scenario scenario_for() const;
  PhysicalParams physical() const;
  // One line "key=value ..." with the resolved settings, for CSV headers.
  std::string describe() const;
};

struct ParseResult {
  std::optional<RunConfig> config;  // empty when the parser already handled the request (--help)
  int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitOptimizer = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitUsage = 64;

// Parses argv (flags, subcommand, optional --config file); prints diagnostics to stderr.
ParseResult parse_command_line(int argc, const char* const* argv);

}  // namespace sdosm::cli

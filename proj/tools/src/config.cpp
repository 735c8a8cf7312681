#include "config.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "csv.hpp"
#include "sdosm/errors.hpp"

namespace sdosm::cli {

using timeloop::Coupling;
using timeloop::ScenarioKind;

std::string to_string(Command c) {
  switch (c) {
    case Command::Optimize: return "optimize";
    case Command::Run: return "run";
    case Command::SweepS: return "sweep-s";
    case Command::DumpMesh: return "dump-mesh";
  }
  return "?";
}

void RunConfig::validate() const {
  auto positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0)) throw DomainError(std::string(name) + " must be positive");
  };
  positive(dt, "dt");
  positive(h, "h");
  positive(mu_f, "mu-f");
  positive(eta1, "eta1");
  positive(eta2, "eta2");
  positive(band_multiplier, "band-multiplier");
  positive(alpha_f, "alpha-f");
  positive(alpha_p, "alpha-p");
  positive(zero_depth, "zero-depth");
  if (S_p && !(*S_p >= 0.0)) throw DomainError("S_p must be non-negative");
  if (xi_f && !(*xi_f >= 0.0)) throw DomainError("xi-f must be non-negative");
  if (theta && !(*theta > 0.0 && *theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
  if (t_final && !(*t_final >= 0.0)) throw DomainError("t-final must be non-negative");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("tol must lie in (0, 1)");
  if (max_iter < 1) throw DomainError("max-iter must be at least 1");
  if (level < 1) throw DomainError("level must be at least 1");
  if (nx < 0) throw DomainError("nx must be non-negative");
  if (grading_layers && *grading_layers < 0) throw DomainError("grading-layers must be non-negative");
  if (grading_ratio && !(*grading_ratio >= 1.0)) throw DomainError("grading-ratio must be at least 1");
  if (alpha_f.has_value() != alpha_p.has_value()) throw DomainError("alpha-f and alpha-p must be given together");
  if (sweep_points < 1) throw DomainError("points must be at least 1");
  if (!(sweep_factor >= 1.0)) throw DomainError("sweep-factor must be at least 1");
  for (double t : snapshots)
    if (!(t >= 0.0)) throw DomainError("snapshot times must be non-negative");
  physical().validate();
}

PhysicalParams RunConfig::physical() const {
  PhysicalParams p = analysis::test_case_params(test_case);
  if (scenario == ScenarioKind::PeriodicErrorEquation && command != Command::Optimize) p.xi_f = kInfinity;
  if (mu_f) p.mu_f = *mu_f;
  if (eta1) p.eta1 = *eta1;
  if (eta2) p.eta2 = *eta2;
  if (S_p) p.S_p = *S_p;
  if (xi_f) p.xi_f = *xi_f;
  return p;
}

timeloop::Scenario RunConfig::scenario_for() const {
  timeloop::Scenario sc = timeloop::make_scenario(scenario, test_case);
  sc.params = physical();
  if (theta) sc.theta = *theta;
  if (t_final) sc.t_final = *t_final;
  if (band_multiplier) sc.band_multiplier = *band_multiplier;
  if (convention) sc.convention = *convention;
  if (coupling) sc.default_coupling = *coupling;
  if (grading_layers) sc.grading.boundary_layers = *grading_layers;
  if (grading_ratio) sc.grading.ratio = *grading_ratio;
  if (zero_depth) sc.zero_mode_depth = *zero_depth;
  return sc;
}

std::string RunConfig::describe() const {
  std::ostringstream os;
  const PhysicalParams p = physical();
  os << "command=" << to_string(command);
  if (command == Command::Optimize) {
    os << " test_case=" << sdosm::to_string(test_case) << " theta=" << num(theta.value_or(1.0))
       << " dt=" << num(dt.value_or(0.0)) << " h=" << num(h.value_or(0.0)) << " gamma=" << num(gamma)
       << " band_multiplier=" << num(band_multiplier.value_or(1.0)) << " include_zero=" << include_zero
       << " zero_depth=" << (zero_depth ? num(*zero_depth) : std::string("halfplane"))
       << " convention=" << sdosm::to_string(convention.value_or(TimeFactorConvention::EffectiveThetaDt));
  } else {
    const timeloop::Scenario sc = scenario_for();
    os << " scenario=" << timeloop::to_string(scenario) << " test_case=" << sdosm::to_string(test_case)
       << " theta=" << num(sc.theta) << " dt=" << (dt ? num(*dt) : std::string("none"))
       << " t_final=" << num(sc.t_final) << " level=" << level << " nx=" << nx
       << " grading=" << sc.grading.boundary_layers << ":" << num(sc.grading.ratio)
       << " coupling=" << timeloop::to_string(sc.default_coupling) << " tol=" << num(tol)
       << " max_iter=" << max_iter << " band_multiplier=" << num(sc.band_multiplier)
       << " convention=" << sdosm::to_string(sc.convention)
       << " seed=" << (seed ? std::to_string(*seed) : std::string("default")) << " zero_guess=" << zero_guess;
    if (alpha_f) os << " alpha_f=" << num(*alpha_f) << " alpha_p=" << num(*alpha_p);
    if (command == Command::SweepS) os << " points=" << sweep_points << " sweep_factor=" << num(sweep_factor);
  }
  os << " mu_f=" << num(p.mu_f) << " eta1=" << num(p.eta1) << " eta2=" << num(p.eta2) << " S_p=" << num(p.S_p)
     << " xi_f=" << num(p.xi_f);
  return os.str();
}

namespace {

template <class Enum, class Parse>
void convert(const std::optional<std::string>& s, std::optional<Enum>& out, Parse parse) {
  if (s) out = parse(*s);
}

}  // namespace

ParseResult parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"Optimized Schwarz (Robin-Robin) solver for the time-dependent Stokes-Darcy problem", "sdosm"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Read 'key = value' settings from a file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  RunConfig c;
  std::string test_case = "A";
  std::optional<std::string> scenario, coupling, convention;
  std::optional<std::uint64_t> seed;

  app.add_option("--test-case", test_case, "A, B, C or D");
  app.add_option("--scenario", scenario, "periodic, manufactured or lid");
  app.add_option("--mu-f", c.mu_f, "override the fluid viscosity");
  app.add_option("--eta1", c.eta1, "override the horizontal permeability");
  app.add_option("--eta2", c.eta2, "override the vertical permeability");
  app.add_option("--S-p", c.S_p, "override the storage coefficient");
  app.add_option("--xi-f", c.xi_f, "override the slip coefficient (inf: no slip)");
  app.add_option("--theta", c.theta, "theta of the time scheme");
  app.add_option("--dt", c.dt, "time step");
  app.add_option("--t-final", c.t_final, "final time (0: one step)");
  app.add_option("--level", c.level, "mesh refinement level, 1 = coarsest");
  app.add_option("--nx", c.nx, "interface cells (overrides --level)");
  app.add_option("--grading-layers", c.grading_layers, "graded layers near walls and interface");
  app.add_option("--grading-ratio", c.grading_ratio, "size ratio between graded layers");
  app.add_option("--h", c.h, "mesh size (optimize)");
  app.add_option("--gamma", c.gamma, "interface length (optimize)");
  app.add_flag("--include-zero", c.include_zero, "include the zero frequency (optimize)");
  app.add_option("--zero-depth", c.zero_depth, "porous depth for the zero frequency");
  app.add_option("--coupling", coupling, "stationary, gmres or monolithic");
  app.add_option("--tol", c.tol, "interface tolerance");
  app.add_option("--max-iter", c.max_iter, "iteration limit per step");
  app.add_option("--band-multiplier", c.band_multiplier, "k_max = c pi / h");
  app.add_option("--convention", convention, "time factor in the symbols: as-printed or effective");
  app.add_option("--alpha-f", c.alpha_f, "manual Robin coefficient of the Stokes side");
  app.add_option("--alpha-p", c.alpha_p, "manual Robin coefficient of the Darcy side");
  app.add_option("--seed", seed, "seed of the random initial interface guess");
  app.add_flag("--zero-guess", c.zero_guess, "start the error equation from a zero interface guess");
  app.add_option("--snapshot", c.snapshots, "times at which plot data is written")->delimiter(',');
  app.add_option("--points", c.sweep_points, "number of s values (sweep-s)");
  app.add_option("--sweep-factor", c.sweep_factor, "s grid spans [s*/f, f s*] (sweep-s)");
  app.add_option("-o,--output", c.output, "output file or file prefix");
  app.add_flag("--timings", c.timings, "add wall-clock columns (output no longer reproducible)");

  auto* optimize = app.add_subcommand("optimize", "optimal Robin pair for given parameters")->fallthrough();
  auto* run = app.add_subcommand("run", "run a scenario and tabulate interface iterations")->fallthrough();
  auto* sweep = app.add_subcommand("sweep-s", "iterations over a grid of s around s*")->fallthrough();
  auto* dump = app.add_subcommand("dump-mesh", "write the mesh of a scenario")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return {std::nullopt, app.exit(e)};
  } catch (const CLI::CallForAllHelp& e) {
    return {std::nullopt, app.exit(e)};
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return {std::nullopt, kExitUsage};
  }

  auto usage = [](const std::string& msg) -> ParseResult {
    std::cerr << "sdosm: " << msg << "\n";
    return {std::nullopt, kExitUsage};
  };

  if (optimize->parsed()) c.command = Command::Optimize;
  else if (run->parsed()) c.command = Command::Run;
  else if (sweep->parsed()) c.command = Command::SweepS;
  else if (dump->parsed()) c.command = Command::DumpMesh;

  try {
    c.test_case = parse_test_case(test_case);
    if (scenario) c.scenario = timeloop::parse_scenario_kind(*scenario);
    convert(coupling, c.coupling, timeloop::parse_coupling);
    convert(convention, c.convention, parse_time_factor_convention);
    c.seed = seed;
    if (c.command == Command::Optimize) {
      if (!c.dt) return usage("optimize requires --dt");
      if (!c.h) return usage("optimize requires --h");
    } else {
      if (!scenario) return usage(to_string(c.command) + " requires --scenario");
      if (c.command != Command::DumpMesh && !c.dt) return usage(to_string(c.command) + " requires --dt");
    }
    c.validate();
  } catch (const DomainError& e) {
    return usage(e.what());
  }
  return {c, kExitOk};
}

}  // namespace sdosm::cli

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include "csv.hpp"
#include "sdosm/errors.hpp"

namespace sdosm::cli {

using timeloop::Scenario;

namespace {

// Output file, or the fallback stream when no path is configured.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw DomainError("cannot open " + path);
    os_ = file_.get();
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

std::string mesh_label(const RunConfig& c) { return c.nx > 0 ? "nx" + std::to_string(c.nx) : "h" + std::to_string(c.level); }

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", t);
  return buf;
}

}  // namespace

double average_later_iterations(const std::vector<ddm::IterationReport>& reports) {
  if (reports.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (std::size_t i = 1; i < reports.size(); ++i) sum += reports[i].iterations;
  return sum / static_cast<double>(reports.size() - 1);
}

std::vector<double> s_grid(double s_star, double factor, int n) {
  if (n <= 1 || factor == 1.0) return {s_star};
  std::vector<double> g;
  const double a = std::log(s_star / factor), b = std::log(s_star * factor);
  for (int i = 0; i < n; ++i) g.push_back(std::exp(a + (b - a) * i / (n - 1)));
  g[static_cast<std::size_t>(n / 2)] = s_star;
  return g;
}

void write_pressure_plot(std::ostream& os, const fem::DofMap& dofs, const timeloop::Snapshot& s) {
  os << "# t = " << num(s.time) << "\n# x y p (fluid)\n";
  for (int v = 0; v < dofs.fluid.num_vertices(); ++v)
    os << num(dofs.fluid.vertices[v].x) << " " << num(dofs.fluid.vertices[v].y) << " " << num(s.stokes[dofs.pf(v)])
       << "\n";
  os << "\n# x y p (porous)\n";
  for (int n = 0; n < dofs.porous.num_nodes(); ++n)
    os << num(dofs.porous.nodes[n].x) << " " << num(dofs.porous.nodes[n].y) << " " << num(s.darcy[n]) << "\n";
}

void write_velocity_plot(std::ostream& os, const fem::DofMap& dofs, const timeloop::Snapshot& s,
                         const PhysicalParams& p) {
  os << "# t = " << num(s.time) << "\n# x y ux uy (fluid)\n";
  for (int n = 0; n < dofs.fluid.num_nodes(); ++n)
    os << num(dofs.fluid.nodes[n].x) << " " << num(dofs.fluid.nodes[n].y) << " " << num(s.stokes[dofs.ux(n)]) << " "
       << num(s.stokes[dofs.uy(n)]) << "\n";
  os << "\n# x y ux uy (porous, cell centers)\n";
  for (const auto& cv : timeloop::postprocess_darcy_velocity(dofs, s.darcy, p))
    os << num(cv.center.x) << " " << num(cv.center.y) << " " << num(cv.ux) << " " << num(cv.uy) << "\n";
}

int cmd_optimize(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const PhysicalParams p = c.physical();
  DiscretizationParams d;
  d.theta = c.theta.value_or(1.0);
  d.dt = *c.dt;
  d.h = *c.h;
  d.gamma_len = c.gamma;
  d.time_factor_convention = c.convention.value_or(TimeFactorConvention::EffectiveThetaDt);
  analysis::MinMaxSolution sol;
  FrequencyBand band;
  try {
    d.validate();
    band = FrequencyBand::from_discretization(d, c.band_multiplier.value_or(1.0), c.include_zero, c.zero_depth);
    sol = c.include_zero ? analysis::solve_minmax_numeric(p, d, band) : analysis::solve_minmax_theorem(p, d, band);
  } catch (const DomainError& e) {
    err << "sdosm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "sdosm: optimizer failed: " << e.what() << "\n";
    return kExitOptimizer;
  }
  Sink sink(c.output, out);
  CsvWriter csv(sink.stream(), c.describe(),
                {"test", "theta", "dt", "h", "gamma", "k_min", "k_max", "regime", "solver", "s_star", "alpha_f",
                 "alpha_p", "case", "rho_max"});
  csv.row({to_string(c.test_case), num(d.theta), num(d.dt), num(d.h), num(d.gamma_len), num(band.k_min),
           num(band.k_max), analysis::to_string(analysis::classify_regime(p, d, band)),
           to_string(sol.robin.provenance), num(sol.s_star), num(sol.robin.alpha_f), num(sol.robin.alpha_p),
           analysis::to_string(sol.case_label), num(sol.rho_max)});
  return kExitOk;
}

int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Scenario sc = c.scenario_for();
  const mesh::CoupledMesh m = sc.build_mesh({c.level, c.nx});
  const DiscretizationParams d = sc.discretization(m, *c.dt);

  analysis::MinMaxSolution sol;
  if (c.alpha_f) {
    sol.robin = {*c.alpha_f, *c.alpha_p, Provenance::Manual};
    sol.rho_max = std::numeric_limits<double>::quiet_NaN();
    sol.s_star = std::numeric_limits<double>::quiet_NaN();
  } else {
    try {
      sol = sc.optimize(d);
    } catch (const SolverError& e) {
      err << "sdosm: optimizer failed: " << e.what() << "\n";
      return kExitOptimizer;
    }
  }

  timeloop::RunOptions opts;
  opts.coupling = sc.default_coupling;
  opts.tol = c.tol;
  opts.max_iter = c.max_iter;
  opts.random_seed = c.seed;
  opts.zero_initial_guess = c.zero_guess;
  opts.snapshot_times = c.snapshots;
  if (opts.snapshot_times.empty() && sc.kind == timeloop::ScenarioKind::LidFiltration && sc.t_final >= 0.75)
    opts.snapshot_times = {0.75};

  const std::string config = c.describe();
  const bool to_files = !c.output.empty();
  std::ofstream steps_file;
  std::unique_ptr<CsvWriter> steps;
  if (to_files) {
    steps_file.open(c.output + "_steps.csv");
    if (!steps_file) throw DomainError("cannot open " + c.output + "_steps.csv");
    std::vector<std::string> header{"step", "time", "iterations", "final_residual", "converged"};
    if (c.timings) header.push_back("wall_time");
    steps = std::make_unique<CsvWriter>(steps_file, config, header);
    opts.on_step = [&](const timeloop::StepRecord& r) {
      std::vector<std::string> row{std::to_string(r.step), num(r.time), std::to_string(r.report.iterations),
                                   num(r.report.final_residual()), r.report.converged ? "1" : "0"};
      if (c.timings) row.push_back(num(r.report.wall_time));
      steps->row(row);
    };
  }

  timeloop::RunResult res;
  try {
    res = timeloop::run_time_loop(sc, m, sc.params, d, sol.robin, opts);
  } catch (const SolverError& e) {
    err << "sdosm: solver failed: " << e.what() << "\n";
    return kExitNotConverged;
  }

  std::vector<std::string> header{"test",    "scenario", "mesh",    "nx",      "h",        "dt",         "alpha_f",
                                  "alpha_p", "s_star",   "rho_max", "iter_t1", "avg_iter_tn", "steps", "completed"};
  const int it1 = res.reports.empty() ? 0 : res.reports.front().iterations;
  std::vector<std::string> row{to_string(c.test_case), timeloop::to_string(sc.kind), mesh_label(c),
                               std::to_string(sc.cells_for({c.level, c.nx})), num(d.h), num(d.dt),
                               num(sol.robin.alpha_f), num(sol.robin.alpha_p), num(sol.s_star), num(sol.rho_max),
                               std::to_string(it1), num(average_later_iterations(res.reports)),
                               std::to_string(res.reports.size()), res.completed ? "1" : "0"};
  if (res.errors) {
    for (const char* h : {"velocity_l2", "fluid_pressure_l2", "darcy_l2"}) header.push_back(h);
    row.push_back(num(res.errors->velocity_l2));
    row.push_back(num(res.errors->fluid_pressure_l2));
    row.push_back(num(res.errors->darcy_l2));
  }
  if (c.timings) {
    double total = 0.0;
    for (const auto& r : res.reports) total += r.wall_time;
    header.push_back("wall_time");
    row.push_back(num(total));
  }
  {
    Sink sink(to_files ? c.output + "_summary.csv" : std::string(), out);
    CsvWriter csv(sink.stream(), config, header);
    csv.row(row);
  }

  if (to_files) {
    for (const auto& s : res.snapshots) {
      std::ofstream pf(c.output + "_pressure_t" + time_tag(s.time) + ".dat");
      write_pressure_plot(pf, res.dofs, s);
      std::ofstream vf(c.output + "_velocity_t" + time_tag(s.time) + ".dat");
      write_velocity_plot(vf, res.dofs, s, sc.params);
    }
  } else if (!res.snapshots.empty()) {
    err << "sdosm: plot data needs --output; snapshots skipped\n";
  }

  if (!res.completed) {
    err << "sdosm: interface iteration did not converge at step " << res.reports.size() << "\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_sweep_s(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Scenario sc = c.scenario_for();
  const mesh::CoupledMesh m = sc.build_mesh({c.level, c.nx});
  const DiscretizationParams d = sc.discretization(m, *c.dt);
  const FrequencyBand band = sc.band(d);
  analysis::MinMaxSolution sol;
  try {
    sol = sc.optimize(d);
  } catch (const SolverError& e) {
    err << "sdosm: optimizer failed: " << e.what() << "\n";
    return kExitOptimizer;
  }

  timeloop::RunOptions opts;
  opts.coupling = sc.default_coupling;
  opts.tol = c.tol;
  opts.max_iter = c.max_iter;
  opts.random_seed = c.seed;
  opts.zero_initial_guess = c.zero_guess;
  opts.compute_errors = false;

  Sink sink(c.output.empty() ? std::string() : c.output + "_sweep.csv", out);
  std::vector<std::string> header{"s", "alpha_f", "alpha_p", "iterations", "predicted_rho_max", "optimal"};
  if (c.timings) header.push_back("wall_time");
  CsvWriter csv(sink.stream(), c.describe(), header);
  for (double s : s_grid(sol.s_star, c.sweep_factor, c.sweep_points)) {
    const RobinPair robin = analysis::robin_from_s(s, sc.params, d, Provenance::Manual);
    std::string iters;
    double wall = 0.0;
    try {
      const auto res = timeloop::run_time_loop(sc, m, sc.params, d, robin, opts);
      if (res.completed && !res.reports.empty()) iters = std::to_string(res.reports.front().iterations);
      for (const auto& r : res.reports) wall += r.wall_time;
    } catch (const SolverError& e) {
      err << "sdosm: s = " << num(s) << ": " << e.what() << "\n";
    }
    std::vector<std::string> row{num(s),  num(robin.alpha_f), num(robin.alpha_p), iters,
                                 num(analysis::band_objective(s, sc.params, d, band)), s == sol.s_star ? "1" : "0"};
    if (c.timings) row.push_back(num(wall));
    csv.row(row);
  }
  return kExitOk;
}

int cmd_dump_mesh(const RunConfig& c, std::ostream& out, std::ostream&) {
  const Scenario sc = c.scenario_for();
  const mesh::CoupledMesh m = sc.build_mesh({c.level, c.nx});
  Sink sink(c.output, out);
  mesh::write_mesh(sink.stream(), m);
  return kExitOk;
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    switch (c.command) {
      case Command::Optimize: return cmd_optimize(c, out, err);
      case Command::Run: return cmd_run(c, out, err);
      case Command::SweepS: return cmd_sweep_s(c, out, err);
      case Command::DumpMesh: return cmd_dump_mesh(c, out, err);
    }
  } catch (const DomainError& e) {
    err << "sdosm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GeometryError& e) {
    err << "sdosm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "sdosm: " << e.what() << "\n";
    return kExitNotConverged;
  }
  return kExitUsage;
}

}  // namespace sdosm::cli

#pragma once

#include <ostream>
#include <vector>

#include "config.hpp"
#include "sdosm/timeloop.hpp"

namespace sdosm::cli {

// Each command writes CSV (or mesh/plot data) to the configured output, falling back to `out`,
// and returns a process exit code.
int cmd_optimize(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_sweep_s(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_dump_mesh(const RunConfig& c, std::ostream& out, std::ostream& err);
int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err);

// Average interface iterations over the steps after the first; NaN for a single step.
double average_later_iterations(const std::vector<ddm::IterationReport>& reports);

// n log-spaced values over [s/f, f s]; s itself is always a grid value.
std::vector<double> s_grid(double s_star, double factor, int n);

// Plot data at one snapshot: "x y p" for both pressures and "x y ux uy" for both velocities
// (Darcy velocity at cell centers).
void write_pressure_plot(std::ostream& os, const fem::DofMap& dofs, const timeloop::Snapshot& s);
void write_velocity_plot(std::ostream& os, const fem::DofMap& dofs, const timeloop::Snapshot& s,
                         const PhysicalParams& p);

}  // namespace sdosm::cli

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sdosm/ddm.hpp"
#include "sdosm/scenario.hpp"

namespace sdosm::timeloop {

struct ErrorReport {
  double velocity_l2 = 0.0;  // at the final time
  double fluid_pressure_l2 = 0.0;
  double darcy_l2 = 0.0;
  double velocity_linf_l2 = 0.0;  // max over time levels
  double fluid_pressure_linf_l2 = 0.0;
  double darcy_linf_l2 = 0.0;
};

// log2 of successive error ratios (refinement by a factor two).
std::vector<double> observed_rates(const std::vector<double>& errors);

struct StepRecord {
  int step;
  double time;
  const ddm::IterationReport& report;
  const fem::Vector& stokes;
  const fem::Vector& darcy;
};

struct Snapshot {
  double time;
  fem::Vector stokes;
  fem::Vector darcy;
};

struct RunOptions {
  Coupling coupling = Coupling::GMRES;
  double tol = 1e-8;
  int max_iter = 500;
  ddm::StationaryVariant variant = ddm::StationaryVariant::GaussSeidel;
  // Stopping rule of the stationary iteration; defaults to RelativeToInitial for the error
  // equation and RelativeUpdate otherwise.
  std::optional<ddm::StopCriterion> criterion;
  // Seed of the random initial interface guess (first step); the error equation always uses one.
  std::optional<std::uint64_t> random_seed;
  // Start the error equation from zero instead (zero data: converged without iterating).
  bool zero_initial_guess = false;
  std::vector<double> snapshot_times;
  bool compute_errors = true;
  std::function<void(const StepRecord&)> on_step;
};

struct RunResult {
  fem::DofMap dofs;
  fem::Vector stokes;
  fem::Vector darcy;
  ddm::InterfaceState lambda;
  std::vector<ddm::IterationReport> reports;
  std::optional<ErrorReport> errors;
  std::vector<Snapshot> snapshots;
  bool completed = true;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;

RunResult run_time_loop(const Scenario& sc, const mesh::CoupledMesh& m, const PhysicalParams& p,
                        const DiscretizationParams& d, const RobinPair& robin, const RunOptions& opts = {});

// Random interface state with entries uniform in [-1, 1].
ddm::InterfaceState random_interface_state(int n, std::uint64_t seed);

struct CellVelocity {
  mesh::Point center;
  double ux;
  double uy;
};

// u_p = -eta grad p_p at cell centers.
std::vector<CellVelocity> postprocess_darcy_velocity(const fem::DofMap& dofs, const fem::Vector& darcy,
                                                     const PhysicalParams& p);

}  // namespace sdosm::timeloop

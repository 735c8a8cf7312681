#pragma once

#include <map>
#include <optional>
#include <string>

#include "sdosm/analysis.hpp"
#include "sdosm/fem.hpp"
#include "sdosm/mesh.hpp"
#include "sdosm/params.hpp"

namespace sdosm::timeloop {

enum class ScenarioKind { PeriodicErrorEquation, ManufacturedSolution, LidFiltration };
enum class Coupling { Stationary, GMRES, Monolithic };

std::string to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& s);
std::string to_string(Coupling c);
Coupling parse_coupling(const std::string& s);

struct ExactSolution {
  fem::VectorField velocity;
  fem::ScalarField fluid_pressure;
  fem::ScalarField darcy_pressure;
};

// Mesh selection: a refinement level (1 = coarsest) or an explicit interface cell count.
struct MeshChoice {
  int level = 1;
  int nx = 0;  // overrides level when positive
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::ManufacturedSolution;
  TestCase test_case = TestCase::A;
  PhysicalParams params;
  mesh::Rectangle fluid{}, porous{};
  bool periodic = false;
  std::map<mesh::BoundarySide, mesh::BoundaryTag> tags;

  fem::VectorField stokes_force;
  fem::VectorField stokes_traction;  // on Traction sides
  fem::ScalarField darcy_force;
  fem::VectorField velocity_bc;
  fem::ScalarField darcy_bc;
  fem::VectorField initial_velocity;
  fem::ScalarField initial_darcy;
  std::optional<ExactSolution> exact;

  double t_final = 1.0;  // <= 0: a single step
  double theta = 1.0;
  TimeFactorConvention convention = TimeFactorConvention::EffectiveThetaDt;
  double band_multiplier = 2.0;
  bool include_zero = false;
  std::optional<double> zero_mode_depth;
  Coupling default_coupling = Coupling::GMRES;
  mesh::GradingSpec grading{};
  int base_cells = 0;  // interface cells at level 1

  mesh::CoupledMesh build_mesh(const MeshChoice& choice) const;
  int cells_for(const MeshChoice& choice) const;
  int num_steps(double dt) const;
  DiscretizationParams discretization(const mesh::CoupledMesh& m, double dt) const;
  FrequencyBand band(const DiscretizationParams& d) const;
  // Theorem solver, or Nelder-Mead when the zero mode is part of the band.
  analysis::MinMaxSolution optimize(const DiscretizationParams& d) const;
};

// Error equation on (0,1)x(-1,1) with periodic lateral sides and zero tangential velocity.
Scenario make_periodic_scenario(TestCase t);
// Closed-form solution on (0,0.5)x(0.5,1.5) with the interface at y = 1, backward Euler.
Scenario make_manufactured_scenario(TestCase t);
// Lid-driven filtration on the unit square with the interface at y = 0.4, Crank-Nicolson.
Scenario make_lid_scenario(TestCase t);
Scenario make_scenario(ScenarioKind k, TestCase t);

// Ramped lid speed min(2 t / t_f, 1) * U_f.
double lid_speed(double t, double t_f = 1.0, double U_f = 1.0);

}  // namespace sdosm::timeloop

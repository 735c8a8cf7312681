#include "sdosm/scenario.hpp"

#include <cmath>

#include "sdosm/analysis.hpp"
#include "sdosm/errors.hpp"
#include "sdosm/manufactured.hpp"

namespace sdosm::timeloop {

using mesh::BoundarySide;
using mesh::BoundaryTag;

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::PeriodicErrorEquation: return "periodic";
    case ScenarioKind::ManufacturedSolution: return "manufactured";
    case ScenarioKind::LidFiltration: return "lid";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "periodic") return ScenarioKind::PeriodicErrorEquation;
  if (s == "manufactured" || s == "analytic") return ScenarioKind::ManufacturedSolution;
  if (s == "lid" || s == "cavity" || s == "filtration") return ScenarioKind::LidFiltration;
  throw DomainError("unknown scenario: " + s);
}

std::string to_string(Coupling c) {
  switch (c) {
    case Coupling::Stationary: return "stationary";
    case Coupling::GMRES: return "gmres";
    case Coupling::Monolithic: return "monolithic";
  }
  return "?";
}

Coupling parse_coupling(const std::string& s) {
  if (s == "stationary") return Coupling::Stationary;
  if (s == "gmres") return Coupling::GMRES;
  if (s == "monolithic") return Coupling::Monolithic;
  throw DomainError("unknown coupling: " + s);
}

int Scenario::cells_for(const MeshChoice& choice) const {
  if (choice.nx > 0) return choice.nx;
  if (choice.level < 1) throw DomainError("mesh level must be >= 1");
  return base_cells << (choice.level - 1);
}

mesh::CoupledMesh Scenario::build_mesh(const MeshChoice& choice) const {
  const int n = cells_for(choice);
  mesh::CoupledMesh m;
  if (kind == ScenarioKind::LidFiltration) {
    // Keep the physical thickness of the graded layers fixed under refinement.
    const int refine = std::max(1, n / std::max(1, base_cells));
    mesh::GradingSpec g = grading;
    g.boundary_layers *= refine;
    g.ratio = std::pow(grading.ratio, 1.0 / refine);
    m = mesh::build_graded(fluid, porous, n, g);
  } else {
    const double w = fluid.width();
    const int ny_f = std::max(1, static_cast<int>(std::lround(n * fluid.height() / w)));
    const int ny_p = std::max(1, static_cast<int>(std::lround(n * porous.height() / w)));
    m = mesh::build_uniform(fluid, porous, n, ny_f, ny_p, periodic);
  }
  for (const auto& [side, tag] : tags) m.set_tag(side, tag);
  return m;
}

int Scenario::num_steps(double dt) const {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (t_final <= 0.0) return 1;
  const double n = t_final / dt;
  const long r = std::lround(n);
  if (r < 1 || std::abs(n - static_cast<double>(r)) > 1e-8 * n) throw DomainError("t_final must be a multiple of dt");
  return static_cast<int>(r);
}

DiscretizationParams Scenario::discretization(const mesh::CoupledMesh& m, double dt) const {
  DiscretizationParams d;
  d.theta = theta;
  d.dt = dt;
  d.h = m.h_avg;
  d.gamma_len = fluid.width();
  d.time_factor_convention = convention;
  d.validate();
  return d;
}

FrequencyBand Scenario::band(const DiscretizationParams& d) const {
  return FrequencyBand::from_discretization(d, band_multiplier, include_zero, zero_mode_depth);
}

analysis::MinMaxSolution Scenario::optimize(const DiscretizationParams& d) const {
  const FrequencyBand b = band(d);
  return b.include_zero ? analysis::solve_minmax_numeric(params, d, b) : analysis::solve_minmax_theorem(params, d, b);
}

Scenario make_periodic_scenario(TestCase t) {
  Scenario s;
  s.kind = ScenarioKind::PeriodicErrorEquation;
  s.test_case = t;
  s.params = analysis::test_case_params(t);
  s.params.xi_f = kInfinity;
  s.fluid = {0.0, 1.0, 0.0, 1.0};
  s.porous = {0.0, 1.0, -1.0, 0.0};
  s.periodic = true;
  s.tags = {{BoundarySide::FluidTop, BoundaryTag::DirichletVel}, {BoundarySide::PorousBottom, BoundaryTag::DirichletDarcy}};
  s.t_final = 0.0;
  s.theta = 0.5;
  s.convention = TimeFactorConvention::EffectiveThetaDt;
  s.include_zero = true;
  s.zero_mode_depth = 1.0;  // depth of the porous layer
  s.default_coupling = Coupling::Stationary;
  s.base_cells = 10;
  return s;
}

Scenario make_manufactured_scenario(TestCase t) {
  Scenario s;
  s.kind = ScenarioKind::ManufacturedSolution;
  s.test_case = t;
  s.params = analysis::test_case_params(t);
  s.fluid = {0.0, 0.5, 1.0, 1.5};
  s.porous = {0.0, 0.5, 0.5, 1.0};
  s.tags = {{BoundarySide::FluidTop, BoundaryTag::Traction},   {BoundarySide::FluidLeft, BoundaryTag::DirichletVel},
            {BoundarySide::FluidRight, BoundaryTag::DirichletVel}, {BoundarySide::PorousBottom, BoundaryTag::DirichletDarcy},
            {BoundarySide::PorousLeft, BoundaryTag::DirichletDarcy}, {BoundarySide::PorousRight, BoundaryTag::DirichletDarcy}};
  const PhysicalParams p = s.params;
  const double a = 1.0;  // Beavers-Joseph coefficient
  s.exact = ExactSolution{
      [p, a](double x, double y, double tt) { return manufactured_fields(tt, a, p, x, y).u_f; },
      [p, a](double x, double y, double tt) { return manufactured_fields(tt, a, p, x, y).p_f; },
      [p, a](double x, double y, double tt) { return manufactured_fields(tt, a, p, x, y).p_p; }};
  s.stokes_force = [p, a](double x, double y, double tt) { return manufactured_fields(tt, a, p, x, y).f_f; };
  s.darcy_force = [p, a](double x, double y, double tt) { return manufactured_fields(tt, a, p, x, y).f_p; };
  const mesh::Rectangle box = s.fluid;
  s.stokes_traction = [p, a, box](double x, double y, double tt) -> std::array<double, 2> {
    const auto st = manufactured_fields(tt, a, p, x, y).stress;
    double nx = 0.0, ny = 0.0;
    if (std::abs(y - box.y1) < 1e-12) ny = 1.0;
    else if (std::abs(x - box.x0) < 1e-12) nx = -1.0;
    else if (std::abs(x - box.x1) < 1e-12) nx = 1.0;
    return {st[0] * nx + st[1] * ny, st[1] * nx + st[2] * ny};
  };
  s.velocity_bc = s.exact->velocity;
  s.darcy_bc = s.exact->darcy_pressure;
  s.initial_velocity = s.exact->velocity;
  s.initial_darcy = s.exact->darcy_pressure;
  s.t_final = 0.5;
  s.theta = 1.0;
  s.convention = TimeFactorConvention::EffectiveThetaDt;
  s.default_coupling = Coupling::GMRES;
  s.base_cells = 5;
  return s;
}

double lid_speed(double t, double t_f, double U_f) { return std::min(2.0 * U_f * t / t_f, U_f); }

Scenario make_lid_scenario(TestCase t) {
  Scenario s;
  s.kind = ScenarioKind::LidFiltration;
  s.test_case = t;
  s.params = analysis::test_case_params(t);
  s.fluid = {0.0, 1.0, 0.4, 1.0};
  s.porous = {0.0, 1.0, 0.0, 0.4};
  s.tags = {{BoundarySide::FluidTop, BoundaryTag::Inflow},         {BoundarySide::FluidLeft, BoundaryTag::DirichletVel},
            {BoundarySide::FluidRight, BoundaryTag::DirichletVel}, {BoundarySide::PorousBottom, BoundaryTag::DirichletDarcy},
            {BoundarySide::PorousLeft, BoundaryTag::NeumannDarcy}, {BoundarySide::PorousRight, BoundaryTag::NeumannDarcy}};
  s.velocity_bc = [](double x, double y, double tt) -> std::array<double, 2> {
    const bool lid = std::abs(y - 1.0) < 1e-12 && x > 1e-12 && x < 1.0 - 1e-12;
    return {lid ? lid_speed(tt) : 0.0, 0.0};
  };
  s.t_final = 1.0;
  s.theta = 0.5;
  s.convention = TimeFactorConvention::AsPrinted;
  s.default_coupling = Coupling::GMRES;
  s.base_cells = 21;
  s.grading = {1, 1.5};
  return s;
}

Scenario make_scenario(ScenarioKind k, TestCase t) {
  switch (k) {
    case ScenarioKind::PeriodicErrorEquation: return make_periodic_scenario(t);
    case ScenarioKind::ManufacturedSolution: return make_manufactured_scenario(t);
    case ScenarioKind::LidFiltration: return make_lid_scenario(t);
  }
  throw DomainError("unknown scenario");
}

}  // namespace sdosm::timeloop

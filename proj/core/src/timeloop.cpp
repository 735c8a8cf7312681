#include "sdosm/timeloop.hpp"

#include <algorithm>
#include <cmath>

#include "sdosm/errors.hpp"
#include "sdosm/random.hpp"

namespace sdosm::timeloop {

using fem::Vector;

std::vector<double> observed_rates(const std::vector<double>& e) {
  std::vector<double> r;
  for (std::size_t i = 1; i < e.size(); ++i) r.push_back(std::log2(e[i - 1] / e[i]));
  return r;
}

ddm::InterfaceState random_interface_state(int n, std::uint64_t seed) {
  Lcg64 rng(seed);
  ddm::InterfaceState s = ddm::InterfaceState::zero(n);
  for (int i = 0; i < n; ++i) s.lambda_f[i] = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < n; ++i) s.lambda_p[i] = rng.uniform(-1.0, 1.0);
  return s;
}

RunResult run_time_loop(const Scenario& sc, const mesh::CoupledMesh& m, const PhysicalParams& p,
                        const DiscretizationParams& d, const RobinPair& robin, const RunOptions& opts) {
  p.validate();
  d.validate();
  RunResult res;
  res.dofs = fem::build_dofmap(m, p.no_slip_interface());
  const auto& dofs = res.dofs;
  const auto sops = fem::assemble_stokes_operators(m, dofs, p);
  const auto dops = fem::assemble_darcy_operators(m, dofs, p);

  std::unique_ptr<fem::StokesSystem> stokes;
  std::unique_ptr<fem::DarcySystem> darcy;
  std::unique_ptr<ddm::InterfaceProblem> prob;
  std::unique_ptr<ddm::MonolithicSystem> mono;
  if (opts.coupling == Coupling::Monolithic) {
    mono = std::make_unique<ddm::MonolithicSystem>(sops, dops, dofs, p, d);
  } else {
    robin.validate();
    stokes = std::make_unique<fem::StokesSystem>(sops, dofs, d, robin);
    darcy = std::make_unique<fem::DarcySystem>(dops, dofs, p, d, robin);
    prob = std::make_unique<ddm::InterfaceProblem>(*stokes, *darcy, robin);
  }

  const double t0 = 0.0;
  res.stokes = fem::interpolate_stokes(dofs, sc.initial_velocity, sc.exact ? sc.exact->fluid_pressure : nullptr, t0);
  res.darcy = fem::interpolate_darcy(dofs, sc.initial_darcy, t0);
  const int ng = dofs.interface_size();
  if (prob) res.lambda = prob->consistent_lambdas(res.stokes, res.darcy);
  else res.lambda = ddm::InterfaceState::zero(ng);

  const bool error_eq = sc.kind == ScenarioKind::PeriodicErrorEquation;
  const ddm::StopCriterion criterion =
      opts.criterion.value_or(error_eq ? ddm::StopCriterion::RelativeToInitial : ddm::StopCriterion::RelativeUpdate);
  std::optional<std::uint64_t> seed = opts.random_seed;
  if (error_eq && !seed && !opts.zero_initial_guess) seed = kDefaultSeed;

  ErrorReport err;
  auto measure = [&](double t) {
    if (!sc.exact || !opts.compute_errors) return;
    err.velocity_l2 = fem::l2_error_velocity(dofs, res.stokes, sc.exact->velocity, t);
    err.fluid_pressure_l2 = fem::l2_error_fluid_pressure(dofs, res.stokes, sc.exact->fluid_pressure, t);
    err.darcy_l2 = fem::l2_error_darcy(dofs, res.darcy, sc.exact->darcy_pressure, t);
    err.velocity_linf_l2 = std::max(err.velocity_linf_l2, err.velocity_l2);
    err.fluid_pressure_linf_l2 = std::max(err.fluid_pressure_linf_l2, err.fluid_pressure_l2);
    err.darcy_linf_l2 = std::max(err.darcy_linf_l2, err.darcy_l2);
  };

  auto stokes_load = [&](double t) {
    return Vector(fem::assemble_stokes_load(dofs, sc.stokes_force, t) +
                  fem::assemble_stokes_traction(m, dofs, sc.stokes_traction, t));
  };
  Vector lf_prev = stokes_load(t0);
  Vector lp_prev = fem::assemble_darcy_load(dofs, sc.darcy_force, t0);
  const int nsteps = sc.num_steps(d.dt);
  for (int n = 1; n <= nsteps; ++n) {
    const double t = n * d.dt;
    const Vector lf_now = stokes_load(t);
    const Vector lp_now = fem::assemble_darcy_load(dofs, sc.darcy_force, t);
    const Vector dir_u = fem::stokes_dirichlet(dofs, sc.velocity_bc, t);
    const Vector dir_p = fem::darcy_dirichlet(dofs, sc.darcy_bc, t);

    ddm::IterationReport rep;
    if (mono) {
      auto [u, pp] = mono->step(res.stokes, res.darcy, lf_prev, lf_now, lp_prev, lp_now, dir_u, dir_p);
      res.stokes = std::move(u);
      res.darcy = std::move(pp);
      rep.converged = true;
    } else {
      const Vector rs = stokes->data_rhs(res.stokes, res.lambda.lambda_f, lf_prev, lf_now);
      const Vector rd = darcy->data_rhs(res.darcy, res.lambda.lambda_p, lp_prev, lp_now);
      const ddm::InterfaceState chi = prob->chi(rs, dir_u, rd, dir_p);
      ddm::InterfaceState guess = res.lambda;
      if (n == 1) guess = seed ? random_interface_state(ng, *seed) : ddm::InterfaceState::zero(ng);

      ddm::InterfaceState sol;
      if (opts.coupling == Coupling::GMRES) {
        std::tie(sol, rep) = ddm::interface_gmres(*prob, chi.lambda_f, chi.lambda_p, guess, {opts.tol, opts.max_iter});
      } else {
        ddm::StationaryOptions so{opts.tol, opts.max_iter, opts.variant, criterion};
        std::tie(sol, rep) = ddm::stationary_iteration(*prob, guess, chi.lambda_f, chi.lambda_p, so);
      }
      res.stokes = stokes->solve(rs, dir_u, sol.lambda_f);
      res.darcy = darcy->solve(rd, dir_p, sol.lambda_p);
      res.lambda = std::move(sol);
    }
    res.reports.push_back(rep);
    measure(t);
    for (double ts : opts.snapshot_times)
      if (std::abs(ts - t) <= 1e-9 * std::max(1.0, ts)) res.snapshots.push_back({t, res.stokes, res.darcy});
    if (opts.on_step) opts.on_step(StepRecord{n, t, res.reports.back(), res.stokes, res.darcy});
    if (!rep.converged) {
      res.completed = false;
      break;
    }
    lf_prev = lf_now;
    lp_prev = lp_now;
  }
  if (sc.exact && opts.compute_errors) res.errors = err;
  return res;
}

std::vector<CellVelocity> postprocess_darcy_velocity(const fem::DofMap& dofs, const Vector& darcy,
                                                     const PhysicalParams& p) {
  std::vector<CellVelocity> out;
  for (int c = 0; c < static_cast<int>(dofs.porous.cells.size()); ++c) {
    const auto v = fem::evaluate_q2(dofs.porous, darcy, 0, c, 0.5, 0.5);
    out.push_back({v.x, -p.eta1 * v.dx, -p.eta2 * v.dy});
  }
  return out;
}

}  // namespace sdosm::timeloop

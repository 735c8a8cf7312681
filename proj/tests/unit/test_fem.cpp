#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "sdosm/analysis.hpp"
#include "sdosm/errors.hpp"
#include "sdosm/fem.hpp"
#include "sdosm/mesh.hpp"

using namespace sdosm;
using namespace sdosm::fem;
using mesh::BoundarySide;
using mesh::BoundaryTag;

namespace {

const mesh::Rectangle kFluid{0.0, 1.0, 0.0, 1.0};
const mesh::Rectangle kPorous{0.0, 1.0, -1.0, 0.0};

DiscretizationParams disc(double theta, double dt) {
  DiscretizationParams d;
  d.theta = theta;
  d.dt = dt;
  return d;
}

PhysicalParams unit_params() {
  PhysicalParams p;
  p.mu_f = 0.7;
  p.eta1 = 1.3;
  p.eta2 = 0.6;
  p.S_p = 0.5;
  return p;
}

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// Mass matrix of 1D quadratic Lagrange elements on a uniform interface, assembled by hand.
Eigen::MatrixXd quadratic_mass_1d(int cells, double h) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * cells + 1, 2 * cells + 1);
  const double e[3][3] = {{4, 2, -1}, {2, 16, 2}, {-1, 2, 4}};
  for (int c = 0; c < cells; ++c)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m(2 * c + a, 2 * c + b) += h / 30.0 * e[a][b];
  return m;
}

}  // namespace

TEST_CASE("quadrature") {
  for (int n = 1; n <= 5; ++n) {
    const QuadratureRule q = gauss_legendre(n);
    REQUIRE(q.points.size() == static_cast<std::size_t>(n));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += q.weights[static_cast<std::size_t>(i)] * std::pow(q.points[static_cast<std::size_t>(i)], deg);
      CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS(gauss_legendre(6));
}

TEST_CASE("dof counts") {
  const mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 1, 1, 1, false);
  const DofMap d = build_dofmap(m, true);
  CHECK(d.fluid.num_nodes() == 9);
  CHECK(d.fluid.num_vertices() == 4);
  CHECK(d.stokes_size() == 2 * 9 + 4);
  CHECK(d.darcy_size() == 9);
  CHECK(d.interface_size() == 3);
  CHECK(d.interface_normal_velocity_dofs.size() == 3);

  const mesh::CoupledMesh m2 = mesh::build_uniform(kFluid, kPorous, 4, 3, 2, false);
  const DofMap d2 = build_dofmap(m2, false);
  CHECK(d2.fluid.num_nodes() == 9 * 7);
  CHECK(d2.fluid.num_vertices() == 5 * 4);
  CHECK(d2.porous.num_nodes() == 9 * 5);
  CHECK(d2.interface_size() == 9);
  for (std::size_t i = 1; i < d2.fluid.interface_nodes.size(); ++i) {
    const auto a = d2.fluid.nodes[static_cast<std::size_t>(d2.fluid.interface_nodes[i - 1])];
    const auto b = d2.fluid.nodes[static_cast<std::size_t>(d2.fluid.interface_nodes[i])];
    CHECK(a.x < b.x);
    CHECK(b.y == doctest::Approx(0.0));
  }
  // interface tangential velocity is free with a finite slip coefficient, fixed without slip
  const DofMap d3 = build_dofmap(m2, true);
  int free_tangential = 0;
  for (int k : d2.interface_tangential_velocity_dofs) free_tangential += !d2.stokes_constrained[static_cast<std::size_t>(k)];
  CHECK(free_tangential == 7);
  for (int k : d3.interface_tangential_velocity_dofs) CHECK(d3.stokes_constrained[static_cast<std::size_t>(k)]);
}

TEST_CASE("periodic dofs are identified") {
  const mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 4, 2, 2, true);
  const DofMap d = build_dofmap(m, true);
  // 8 distinct columns of biquadratic nodes instead of 9
  CHECK(d.fluid.num_nodes() == 8 * 5);
  CHECK(d.fluid.num_vertices() == 4 * 3);
  CHECK(d.interface_size() == 8);
  const SparseMatrix mg = interface_mass(m, d);
  CHECK(Eigen::VectorXd::Ones(8).dot(mg * Eigen::VectorXd::Ones(8)) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("interface mass and trace maps") {
  const int nx = 5;
  const mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, nx, 2, 3, false);
  const PhysicalParams p = unit_params();
  const DofMap dofs = build_dofmap(m, true);
  const SparseMatrix mg = interface_mass(m, dofs);
  const Eigen::MatrixXd oracle = quadratic_mass_1d(nx, 1.0 / nx);
  CHECK((Eigen::MatrixXd(mg) - oracle).cwiseAbs().maxCoeff() < 1e-14);

  const int n = dofs.interface_size();
  CHECK(Eigen::VectorXd::Ones(n).dot(mg * Eigen::VectorXd::Ones(n)) == doctest::Approx(1.0).epsilon(1e-14));

  const DiscretizationParams d = disc(1.0, 0.1);
  const RobinPair robin{2.0, 3.0};
  const auto stokes = assemble_stokes(m, dofs, p, d, robin);
  const auto darcy = assemble_darcy(m, dofs, p, d, robin);
  for (int i = 0; i < n; ++i) {
    const Vector e = Vector::Unit(n, i);
    CHECK((stokes->restrict(stokes->extend(e)) - oracle.col(i)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((darcy->restrict(darcy->extend(e)) - oracle.col(i)).cwiseAbs().maxCoeff() < 1e-14);
  }

  // a field vanishing on the interface has zero trace
  const Vector u = interpolate_stokes(dofs, [](double x, double y, double) -> std::array<double, 2> {
    return {x * y, y * (1.0 - x)};
  }, nullptr, 0.0);
  CHECK(stokes->restrict(u).cwiseAbs().maxCoeff() < 1e-15);
  const Vector pp = interpolate_darcy(dofs, [](double x, double y, double) { return y * x * x; }, 0.0);
  CHECK(darcy->restrict(pp).cwiseAbs().maxCoeff() < 1e-15);
  // the Stokes trace is the normal velocity with the outward fluid normal (0, -1)
  const Vector down = interpolate_stokes(dofs, [](double, double, double) -> std::array<double, 2> {
    return {0.0, -2.0};
  }, nullptr, 0.0);
  CHECK((stokes->restrict(down).array() - 2.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("Stokes operators") {
  const mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 3, 3, 2, false);
  PhysicalParams p = unit_params();
  p.xi_f = 4.0;
  const DofMap dofs = build_dofmap(m, false);
  const StokesOperators ops = assemble_stokes_operators(m, dofs, p);

  SUBCASE("symmetry") {
    CHECK(max_abs(ops.mass - SparseMatrix(ops.mass.transpose())) < 1e-14);
    CHECK(max_abs(ops.viscous - SparseMatrix(ops.viscous.transpose())) < 1e-13 * max_abs(ops.viscous));
    CHECK(max_abs(ops.grad - SparseMatrix(ops.div.transpose())) < 1e-14);
  }
  SUBCASE("linear solenoidal field has zero discrete divergence") {
    const Vector u = interpolate_stokes(dofs, [](double x, double y, double) -> std::array<double, 2> {
      return {0.3 + 2.0 * x - 0.5 * y, 1.1 + 0.7 * x - 2.0 * y};
    }, nullptr, 0.0);
    CHECK((ops.div * u).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("divergence of (x, 0) integrates to the area") {
    const Vector u = interpolate_stokes(dofs, [](double x, double, double) -> std::array<double, 2> {
      return {x, 0.0};
    }, nullptr, 0.0);
    CHECK((ops.div * u).sum() == doctest::Approx(-1.0).epsilon(1e-13));
  }
  SUBCASE("viscous energy of a rigid motion vanishes") {
    const Vector u = interpolate_stokes(dofs, [](double x, double y, double) -> std::array<double, 2> {
      return {1.0 - y, 2.0 + x};
    }, nullptr, 0.0);
    CHECK(std::abs(u.dot(ops.viscous * u)) < 1e-12);
    // shear u = (y, 0): |eps|^2 = 1/2, so 2 mu |eps|^2 = mu per unit area
    const Vector s = interpolate_stokes(dofs, [](double, double y, double) -> std::array<double, 2> {
      return {y, 0.0};
    }, nullptr, 0.0);
    CHECK(s.dot(ops.viscous * s) == doctest::Approx(p.mu_f).epsilon(1e-12));
  }
  SUBCASE("term switch-off") {
    const DiscretizationParams d = disc(1.0, 1.0);
    PhysicalParams q = p;
    q.xi_f = 0.0;
    const StokesOperators o = assemble_stokes_operators(m, dofs, q);
    const StokesSystem sys(o, dofs, d, {0.0, 1.0});
    CHECK(max_abs(sys.matrix() - (o.mass + o.viscous + o.grad + o.div)) < 1e-14);
    const StokesSystem robin(o, dofs, d, {5.0, 1.0});
    CHECK(max_abs(robin.matrix() - sys.matrix() - 5.0 * o.normal_mass) < 1e-13);
  }
  SUBCASE("velocity block is positive definite after constraints") {
    const DiscretizationParams d = disc(0.5, 0.01);
    const SparseMatrix a = ops.mass + d.theta_dt() * (ops.viscous + ops.bjs + 2.0 * ops.normal_mass);
    std::vector<int> free;
    for (int i = 0; i < 2 * dofs.num_velocity_nodes(); ++i)
      if (!dofs.stokes_constrained[static_cast<std::size_t>(i)]) free.push_back(i);
    const Eigen::MatrixXd full(a);
    Eigen::MatrixXd block(free.size(), free.size());
    for (std::size_t i = 0; i < free.size(); ++i)
      for (std::size_t j = 0; j < free.size(); ++j) block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = full(free[i], free[j]);
    CHECK((block - block.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(block).info() == Eigen::Success);
  }
}

TEST_CASE("Darcy operators") {
  mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 4, 2, 3, false);
  m.set_tag(BoundarySide::PorousLeft, BoundaryTag::NeumannDarcy);
  m.set_tag(BoundarySide::PorousRight, BoundaryTag::NeumannDarcy);
  const PhysicalParams p = unit_params();
  const DofMap dofs = build_dofmap(m, true);
  const DarcyOperators ops = assemble_darcy_operators(m, dofs, p);

  SUBCASE("constants lie in the kernel of the stiffness") {
    const Vector one = Vector::Ones(dofs.darcy_size());
    const DarcySystem sys(ops, dofs, p, disc(1.0, 1.0), {1.0, kInfinity});
    CHECK((sys.matrix() * one - p.S_p * (ops.mass * one)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((ops.mass * one).sum() == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("term switch-off") {
    PhysicalParams q = p;
    q.S_p = 1.0;
    q.eta1 = q.eta2 = 1.0;
    const DarcyOperators o = assemble_darcy_operators(m, dofs, q);
    const DarcySystem sys(o, dofs, q, disc(1.0, 1.0), {1.0, kInfinity});
    CHECK(max_abs(sys.matrix() - (o.mass + o.stiffness)) < 1e-14);
  }
  SUBCASE("symmetric and factorizable for test case A") {
    const PhysicalParams a = analysis::test_case_params(TestCase::A);
    const DofMap da = build_dofmap(m, a.no_slip_interface());
    const auto sys = assemble_darcy(m, da, a, disc(1.0, 0.01), {1e7, 105.0});
    CHECK(max_abs(sys->matrix() - SparseMatrix(sys->matrix().transpose())) <= 1e-12 * max_abs(sys->matrix()));
    const Vector x = sys->solve(Vector::Ones(sys->size()), Vector(), Vector());
    CHECK(x.allFinite());
    CHECK((sys->matrix() * x - Vector::Ones(sys->size())).norm() < 1e-8 * x.norm() * max_abs(sys->matrix()));
  }
}

TEST_CASE("Darcy patch test") {
  // Linear pressure with Dirichlet data on the walls and matching Robin data on the interface.
  mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 4, 2, 3, false);
  m.set_tag(BoundarySide::PorousBottom, BoundaryTag::DirichletDarcy);
  const PhysicalParams p = unit_params();
  const DofMap dofs = build_dofmap(m, true);
  const RobinPair robin{1.0, 2.5};
  auto exact = [](double x, double y, double) { return 0.4 - 1.5 * x + 2.0 * y; };
  for (double theta : {1.0, 0.5}) {
    const DiscretizationParams d = disc(theta, 0.1);
    const auto sys = assemble_darcy(m, dofs, p, d, robin);
    const Vector pe = interpolate_darcy(dofs, exact, 0.0);
    // Robin datum: p + alpha_p eta2 dp/dy on the interface
    const Vector lambda = sys->restrict(pe).array() + robin.alpha_p * p.eta2 * 2.0;
    const Vector rhs = build_step_rhs(*sys, pe, lambda, lambda, Vector(), Vector());
    const Vector x = sys->solve(rhs, darcy_dirichlet(dofs, exact, 0.0), Vector());
    CHECK((x - pe).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Stokes patch test") {
  // Constant velocity (0, V) and constant pressure P with Dirichlet walls and Robin data on the interface.
  const mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 3, 4, 2, false);
  const double V = 0.8, P = -1.7;
  auto u = [&](double, double, double) -> std::array<double, 2> { return {0.0, V}; };
  auto pf = [&](double, double, double) { return P; };
  for (double xi : {kInfinity, 3.0}) {
    PhysicalParams p = unit_params();
    p.xi_f = xi;
    const DofMap dofs = build_dofmap(m, p.no_slip_interface());
    const RobinPair robin{4.0, 1.0};
    const DiscretizationParams d = disc(1.0, 0.05);
    const auto sys = assemble_stokes(m, dofs, p, d, robin);
    const Vector ue = interpolate_stokes(dofs, u, pf, 0.0);
    // lambda_f = P - alpha_f u.n with u.n = -V
    const Vector lambda = Vector::Constant(dofs.interface_size(), P + robin.alpha_f * V);
    const Vector rhs = build_step_rhs(*sys, ue, Vector(), lambda, Vector(), Vector());
    const Vector x = sys->solve(rhs, stokes_dirichlet(dofs, u, 0.0), Vector());
    CHECK((x - ue).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("step right-hand side") {
  const mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 3, 2, 2, false);
  const PhysicalParams p = unit_params();
  const DofMap dofs = build_dofmap(m, true);
  const RobinPair robin{2.0, 3.0};
  const int n = dofs.interface_size();
  const Vector lam = Vector::LinSpaced(n, -1.0, 2.0);

  SUBCASE("zero data give a zero vector") {
    const auto s = assemble_stokes(m, dofs, p, disc(0.5, 0.1), robin);
    const Vector z = build_step_rhs(*s, Vector::Zero(s->size()), Vector::Zero(n), Vector::Zero(n),
                                    Vector::Zero(s->size()), Vector::Zero(s->size()));
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("backward Euler drops the previous-level terms") {
    const auto s = assemble_stokes(m, dofs, p, disc(1.0, 0.1), robin);
    const auto dp = assemble_darcy(m, dofs, p, disc(1.0, 0.1), robin);
    const Vector prev = Vector::LinSpaced(s->size(), 0.0, 1.0);
    const Vector load = Vector::LinSpaced(s->size(), 1.0, -1.0);
    CHECK((build_step_rhs(*s, prev, lam, lam, load, load) - build_step_rhs(*s, prev, Vector(), lam, Vector(), load))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    const Vector dprev = Vector::LinSpaced(dp->size(), 0.0, 1.0);
    CHECK((build_step_rhs(*dp, dprev, lam, lam, dprev, dprev) -
           build_step_rhs(*dp, dprev, Vector(), lam, Vector(), dprev))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SUBCASE("interface terms") {
    const DiscretizationParams d = disc(0.5, 0.1);
    const auto s = assemble_stokes(m, dofs, p, d, robin);
    const auto dp = assemble_darcy(m, dofs, p, d, robin);
    const Vector diff = build_step_rhs(*s, Vector(), Vector(), lam, Vector(), Vector());
    CHECK((diff + d.theta_dt() * s->extend(lam)).cwiseAbs().maxCoeff() < 1e-15);
    const Vector dd = build_step_rhs(*dp, Vector(), Vector(), lam, Vector(), Vector());
    CHECK((dd - d.theta_dt() / robin.alpha_p * dp->extend(lam)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(build_step_rhs(*s, Vector(), Vector(), Vector::Zero(n + 1), Vector(), Vector()), DomainError);
    CHECK_THROWS_AS(build_step_rhs(*s, Vector::Zero(3), Vector(), Vector(), Vector(), Vector()), DomainError);
  }
  SUBCASE("load vector of a biquadratic force equals mass times interpolant") {
    auto f = [](double x, double y, double t) -> std::array<double, 2> {
      return {x * x * y + t, (1.0 - y) * y * x * x};
    };
    const StokesOperators ops = assemble_stokes_operators(m, dofs, p);
    const Vector r = assemble_stokes_load(dofs, f, 0.3);
    const Vector oracle = ops.mass * interpolate_stokes(dofs, f, nullptr, 0.3);
    CHECK((r - oracle).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((assemble_stokes_load(dofs, f, 0.3, 5) - r).cwiseAbs().maxCoeff() < 1e-14);
    auto g = [](double x, double y, double) { return x * y * y - 2.0; };
    const DarcyOperators dop = assemble_darcy_operators(m, dofs, p);
    CHECK((assemble_darcy_load(dofs, g, 0.0) - dop.mass * interpolate_darcy(dofs, g, 0.0)).cwiseAbs().maxCoeff() <
          1e-14);
  }
}

TEST_CASE("field evaluation and errors") {
  const mesh::CoupledMesh m = mesh::build_uniform(kFluid, kPorous, 3, 3, 2, false);
  const DofMap dofs = build_dofmap(m, true);
  auto u = [](double x, double y, double) -> std::array<double, 2> { return {x * x * y, y * y - x}; };
  auto pf = [](double x, double y, double) { return x * y - 1.0; };
  const Vector s = interpolate_stokes(dofs, u, pf, 0.0);
  CHECK(l2_error_velocity(dofs, s, u, 0.0) < 1e-14);
  CHECK(l2_error_fluid_pressure(dofs, s, pf, 0.0) < 1e-14);
  // the L2 norm of a unit constant over the unit fluid square is one
  auto zero = [](double, double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
  const Vector one = interpolate_stokes(dofs, [](double, double, double) -> std::array<double, 2> {
    return {1.0, 0.0};
  }, nullptr, 0.0);
  CHECK(l2_error_velocity(dofs, one, zero, 0.0) == doctest::Approx(1.0).epsilon(1e-13));

  const PointValue v = evaluate_q2(dofs.fluid, s, 0, 4, 0.25, 0.75);
  CHECK(v.value == doctest::Approx(v.x.x * v.x.x * v.x.y).epsilon(1e-13));
  CHECK(v.dx == doctest::Approx(2.0 * v.x.x * v.x.y).epsilon(1e-12));
  CHECK(v.dy == doctest::Approx(v.x.x * v.x.x).epsilon(1e-12));
  const PointValue q = evaluate_q1(dofs.fluid, s, 2 * dofs.num_velocity_nodes(), 4, 0.5, 0.5);
  CHECK(q.value == doctest::Approx(q.x.x * q.x.y - 1.0).epsilon(1e-13));
}

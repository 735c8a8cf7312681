#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "sdosm/mesh.hpp"
#include "sdosm/params.hpp"

namespace sdosm::fem {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

using ScalarField = std::function<double(double x, double y, double t)>;
using VectorField = std::function<std::array<double, 2>(double x, double y, double t)>;

struct QuadratureRule {
  std::vector<double> points;  // on [0, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n = 1..5 points on [0, 1].
QuadratureRule gauss_legendre(int n);

// Biquadratic nodes of one subdomain. Local node (i, j), i, j in {0,1,2}, has index i + 3j
// in the reference square; bilinear vertices use i + 2j with i, j in {0,1}.
struct Q2Space {
  mesh::Region region = mesh::Region::Fluid;
  std::vector<mesh::Point> nodes;
  std::vector<int> cells;  // mesh cell indices
  std::vector<std::array<int, 9>> cell_nodes;
  std::vector<std::array<int, 4>> cell_vertices;  // bilinear numbering, lexicographic
  std::vector<std::array<mesh::Point, 4>> cell_geometry;  // counterclockwise corners
  std::vector<mesh::Point> vertices;
  std::vector<std::uint8_t> node_tags;  // bitmask over BoundaryTag
  std::vector<int> interface_nodes;     // ordered by x

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  bool has_tag(int node, mesh::BoundaryTag t) const;
};

Q2Space build_q2_space(const mesh::CoupledMesh& m, mesh::Region region);

// Stokes vector layout: [u_x at Q2 nodes | u_y at Q2 nodes | p_f at Q1 vertices].
// Darcy vector layout:  [p_p at Q2 nodes].
struct DofMap {
  Q2Space fluid;
  Q2Space porous;
  std::vector<char> stokes_constrained;
  std::vector<char> darcy_constrained;
  std::vector<int> interface_normal_velocity_dofs;
  std::vector<int> interface_tangential_velocity_dofs;
  std::vector<int> interface_darcy_dofs;

  int num_velocity_nodes() const { return fluid.num_nodes(); }
  int stokes_size() const { return 2 * fluid.num_nodes() + fluid.num_vertices(); }
  int darcy_size() const { return porous.num_nodes(); }
  int interface_size() const { return static_cast<int>(interface_darcy_dofs.size()); }
  int ux(int node) const { return node; }
  int uy(int node) const { return fluid.num_nodes() + node; }
  int pf(int vertex) const { return 2 * fluid.num_nodes() + vertex; }
};

// Velocity is constrained on DirichletVel/Inflow sides (and u_x on the interface when
// no_slip_interface); Darcy pressure on DirichletDarcy sides. Periodic sides are identified.
DofMap build_dofmap(const mesh::CoupledMesh& m, bool no_slip_interface);

// Mass matrix of the biquadratic interface trace space.
SparseMatrix interface_mass(const mesh::CoupledMesh& m, const DofMap& dofs);

// Parameter-independent pieces of the Stokes problem, all of full Stokes size except the
// interface maps (E: size x n_gamma, S: n_gamma x size).
struct StokesOperators {
  SparseMatrix mass;       // (u, v)
  SparseMatrix viscous;    // (2 mu eps(u), eps(v))
  SparseMatrix bjs;        // xi <u_t, v_t> on the interface
  SparseMatrix grad;       // -(p, div v): velocity rows, pressure columns
  SparseMatrix div;        // -(q, div u): pressure rows, velocity columns
  SparseMatrix normal_mass;  // <u.n, v.n>
  SparseMatrix extension;  // <lambda, v.n>
  SparseMatrix trace;      // u.n at interface nodes
};

struct DarcyOperators {
  SparseMatrix mass;       // (p, q)
  SparseMatrix stiffness;  // (eta grad p, grad q)
  SparseMatrix interface;  // <p, q>
  SparseMatrix extension;  // <lambda, q>
  SparseMatrix trace;      // p at interface nodes
};

StokesOperators assemble_stokes_operators(const mesh::CoupledMesh& m, const DofMap& dofs, const PhysicalParams& p);
DarcyOperators assemble_darcy_operators(const mesh::CoupledMesh& m, const DofMap& dofs, const PhysicalParams& p);

Vector assemble_stokes_load(const DofMap& dofs, const VectorField& f, double t, int quad_points = 3);
// Boundary integral of the prescribed traction over Traction-tagged sides.
Vector assemble_stokes_traction(const mesh::CoupledMesh& m, const DofMap& dofs, const VectorField& g, double t,
                                int quad_points = 3);
Vector assemble_darcy_load(const DofMap& dofs, const ScalarField& f, double t, int quad_points = 3);

// A subdomain problem with fixed matrix, factorized once and reused for every solve.
class SubdomainSystem {
 public:
  virtual ~SubdomainSystem();
  SubdomainSystem(const SubdomainSystem&) = delete;
  SubdomainSystem& operator=(const SubdomainSystem&) = delete;

  int size() const { return static_cast<int>(matrix_.rows()); }
  int interface_size() const { return static_cast<int>(trace_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }
  const std::vector<char>& constrained() const { return constrained_; }
  int num_free() const { return static_cast<int>(free_.size()); }

  // Solves matrix * x = rhs + interface_factor() * extend(lambda) on the free dofs, with the
  // constrained dofs of x taken from `dirichlet`.
  Vector solve(const Vector& rhs, const Vector& dirichlet, const Vector& lambda) const;

  Vector restrict(const Vector& x) const { return trace_ * x; }
  const SparseMatrix& trace() const { return trace_; }
  Vector extend(const Vector& lambda) const { return extension_ * lambda; }
  double interface_factor() const { return interface_factor_; }

  // Right-hand side of one step without the current interface datum.
  virtual Vector data_rhs(const Vector& previous, const Vector& lambda_previous, const Vector& load_previous,
                          const Vector& load_now) const = 0;

 protected:
  SubdomainSystem() = default;
  void setup(SparseMatrix matrix, std::vector<char> constrained, SparseMatrix trace, SparseMatrix extension,
             double interface_factor);
  virtual void factorize(const SparseMatrix& free_block) = 0;
  virtual Vector solve_free(const Vector& b) const = 0;

  SparseMatrix matrix_;
  std::vector<char> constrained_;
  std::vector<int> free_;
  SparseMatrix free_cols_;  // columns of matrix_ restricted to free rows, all columns
  SparseMatrix trace_;
  SparseMatrix extension_;
  double interface_factor_ = 0.0;
};

class StokesSystem final : public SubdomainSystem {
 public:
  StokesSystem(const StokesOperators& ops, const DofMap& dofs, const DiscretizationParams& d, const RobinPair& robin);
  ~StokesSystem() override;

  Vector data_rhs(const Vector& previous, const Vector& lambda_previous, const Vector& load_previous,
                  const Vector& load_now) const override;

 private:
  void factorize(const SparseMatrix& free_block) override;
  Vector solve_free(const Vector& b) const override;

  struct Solver;
  std::unique_ptr<Solver> solver_;
  SparseMatrix explicit_op_;  // (1-theta)*dt*(viscous + bjs + alpha_f R) on velocity, zero elsewhere
  SparseMatrix mass_;
  double theta_ = 1.0, dt_ = 0.0;
};

class DarcySystem final : public SubdomainSystem {
 public:
  DarcySystem(const DarcyOperators& ops, const DofMap& dofs, const PhysicalParams& p, const DiscretizationParams& d,
              const RobinPair& robin);
  ~DarcySystem() override;

  Vector data_rhs(const Vector& previous, const Vector& lambda_previous, const Vector& load_previous,
                  const Vector& load_now) const override;

 private:
  void factorize(const SparseMatrix& free_block) override;
  Vector solve_free(const Vector& b) const override;

  struct Solver;
  std::unique_ptr<Solver> solver_;
  SparseMatrix explicit_op_;
  SparseMatrix storage_;
  double theta_ = 1.0, dt_ = 0.0, alpha_p_ = 1.0;
};

std::unique_ptr<StokesSystem> assemble_stokes(const mesh::CoupledMesh& m, const DofMap& dofs,
                                              const PhysicalParams& p, const DiscretizationParams& d,
                                              const RobinPair& robin);
std::unique_ptr<DarcySystem> assemble_darcy(const mesh::CoupledMesh& m, const DofMap& dofs, const PhysicalParams& p,
                                            const DiscretizationParams& d, const RobinPair& robin);

// Full step right-hand side: data part plus the current interface term.
Vector build_step_rhs(const SubdomainSystem& sys, const Vector& previous, const Vector& lambda_previous,
                      const Vector& lambda_now, const Vector& load_previous, const Vector& load_now);

// Nodal interpolation of boundary/initial data into the subdomain vectors.
Vector interpolate_stokes(const DofMap& dofs, const VectorField& u, const ScalarField& p, double t);
Vector interpolate_darcy(const DofMap& dofs, const ScalarField& p, double t);

// Values on constrained dofs only (other entries zero).
Vector stokes_dirichlet(const DofMap& dofs, const VectorField& u, double t);
Vector darcy_dirichlet(const DofMap& dofs, const ScalarField& p, double t);

// Field evaluation at reference coordinates of a space cell (index into Q2Space::cells).
struct PointValue {
  mesh::Point x;
  double value;
  double dx;
  double dy;
};
PointValue evaluate_q2(const Q2Space& s, const Vector& coeffs, int offset, int cell, double xi, double eta);
PointValue evaluate_q1(const Q2Space& s, const Vector& coeffs, int offset, int cell, double xi, double eta);

// L2 norms of the error against exact fields (n-point Gauss per direction).
double l2_error_velocity(const DofMap& dofs, const Vector& stokes, const VectorField& exact, double t, int n = 5);
double l2_error_fluid_pressure(const DofMap& dofs, const Vector& stokes, const ScalarField& exact, double t,
                               int n = 5);
double l2_error_darcy(const DofMap& dofs, const Vector& darcy, const ScalarField& exact, double t, int n = 5);

}  // namespace sdosm::fem

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "sdosm/fem.hpp"
#include "sdosm/params.hpp"

namespace sdosm::ddm {

using fem::SparseMatrix;
using fem::Vector;

struct InterfaceState {
  Vector lambda_f;
  Vector lambda_p;

  static InterfaceState zero(int n);
  static InterfaceState from_stacked(const Vector& x);
  Vector stacked() const;
  int size() const { return static_cast<int>(lambda_f.size()); }
};

struct IterationReport {
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  double wall_time = 0.0;

  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

// Interface operators of one time step, built on factorized subdomain systems.
class InterfaceProblem {
 public:
  InterfaceProblem(const fem::SubdomainSystem& stokes, const fem::SubdomainSystem& darcy, const RobinPair& robin);

  int size() const { return stokes_.interface_size(); }
  const RobinPair& robin() const { return robin_; }

  // Trace of the homogeneous subdomain solve with interface datum lambda.
  Vector apply_Gf(const Vector& lambda) const;
  Vector apply_Gp(const Vector& lambda) const;

  // Interface-system operator on stacked (lambda_f, lambda_p).
  Vector apply(const Vector& stacked) const;

  // Data part (chi_f, chi_p) of the interface system for the given step right-hand sides.
  InterfaceState chi(const Vector& stokes_rhs, const Vector& stokes_dirichlet, const Vector& darcy_rhs,
                     const Vector& darcy_dirichlet) const;

  // Interface data reproduced from subdomain states: lambda_f = X - alpha_f U, lambda_p = X + alpha_p U,
  // with X the Darcy pressure trace and U the normal velocity trace.
  InterfaceState consistent_lambdas(const Vector& stokes_state, const Vector& darcy_state) const;

  // Interface dofs where both subdomain traces are fixed by Dirichlet data; their two rows
  // decouple from the rest and are solved directly.
  const std::vector<char>& pinned() const { return pinned_; }
  void fix_pinned(InterfaceState& s, const Vector& chi_f, const Vector& chi_p) const;

  const fem::SubdomainSystem& stokes() const { return stokes_; }
  const fem::SubdomainSystem& darcy() const { return darcy_; }

 private:
  const fem::SubdomainSystem& stokes_;
  const fem::SubdomainSystem& darcy_;
  RobinPair robin_;
  std::vector<char> pinned_;
};

enum class StationaryVariant { GaussSeidel, Jacobi };

enum class StopCriterion {
  RelativeUpdate,     // ||x^m - x^{m-1}|| <= tol ||x^m||
  RelativeToInitial,  // ||x^m|| <= tol ||x^0||  (error equation, exact solution zero)
};

struct StationaryOptions {
  double tol = 1e-8;
  int max_iter = 500;
  StationaryVariant variant = StationaryVariant::GaussSeidel;
  StopCriterion criterion = StopCriterion::RelativeUpdate;
};

std::pair<InterfaceState, IterationReport> stationary_iteration(const InterfaceProblem& prob,
                                                                const InterfaceState& state0, const Vector& chi_f,
                                                                const Vector& chi_p, const StationaryOptions& opts);

struct GmresOptions {
  double tol = 1e-8;
  int max_iter = 500;
};

std::pair<InterfaceState, IterationReport> interface_gmres(const InterfaceProblem& prob, const Vector& chi_f,
                                                           const Vector& chi_p, const InterfaceState& state0,
                                                           const GmresOptions& opts);

// Fully coupled theta-step (no Robin splitting); reference for the interface iterations.
class MonolithicSystem {
 public:
  MonolithicSystem(const fem::StokesOperators& stokes, const fem::DarcyOperators& darcy, const fem::DofMap& dofs,
                   const PhysicalParams& p, const DiscretizationParams& d);
  ~MonolithicSystem();

  // Returns (Stokes state, Darcy state) at the new time level.
  std::pair<Vector, Vector> step(const Vector& stokes_previous, const Vector& darcy_previous,
                                 const Vector& stokes_load_previous, const Vector& stokes_load_now,
                                 const Vector& darcy_load_previous, const Vector& darcy_load_now,
                                 const Vector& stokes_dirichlet, const Vector& darcy_dirichlet) const;

  int size() const { return ns_ + nd_; }

 private:
  struct Solver;
  std::unique_ptr<Solver> solver_;
  int ns_ = 0, nd_ = 0;
  double theta_ = 1.0, dt_ = 0.0;
  SparseMatrix matrix_;
  SparseMatrix stokes_mass_, stokes_explicit_, stokes_coupling_;  // coupling: E_f S_p
  SparseMatrix darcy_storage_, darcy_explicit_, darcy_coupling_;  // coupling: E_p S_n
  std::vector<char> constrained_;
  std::vector<int> free_;
  SparseMatrix free_rows_;
};

}  // namespace sdosm::ddm

#include "sdosm/ddm.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/SparseLU>
#ifdef SDOSM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "sdosm/errors.hpp"
#include "sdosm/krylov.hpp"

namespace sdosm::ddm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

InterfaceState InterfaceState::zero(int n) { return {Vector::Zero(n), Vector::Zero(n)}; }

InterfaceState InterfaceState::from_stacked(const Vector& x) {
  const Eigen::Index n = x.size() / 2;
  return {x.head(n), x.tail(n)};
}

Vector InterfaceState::stacked() const {
  Vector x(lambda_f.size() + lambda_p.size());
  x << lambda_f, lambda_p;
  return x;
}

InterfaceProblem::InterfaceProblem(const fem::SubdomainSystem& stokes, const fem::SubdomainSystem& darcy,
                                   const RobinPair& robin)
    : stokes_(stokes), darcy_(darcy), robin_(robin) {
  robin_.validate();
  if (stokes.interface_size() != darcy.interface_size()) throw DomainError("interface sizes differ");
  // An interface dof is pinned when both traces read only constrained dofs there.
  const int n = stokes.interface_size();
  std::vector<char> free_f(n, 0), free_p(n, 0);
  auto mark = [](const fem::SubdomainSystem& sys, const SparseMatrix& trace, std::vector<char>& out) {
    for (int j = 0; j < trace.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(trace, j); it; ++it)
        if (!sys.constrained()[j]) out[it.row()] = 1;
  };
  mark(stokes, stokes.trace(), free_f);
  mark(darcy, darcy.trace(), free_p);
  pinned_.assign(n, 0);
  for (int i = 0; i < n; ++i) pinned_[i] = !free_f[i] && !free_p[i];
}

void InterfaceProblem::fix_pinned(InterfaceState& s, const Vector& chi_f, const Vector& chi_p) const {
  // There G_f = G_p = 0, so the two rows read lambda_f + r lambda_p = chi_f and lambda_p - lambda_f = chi_p.
  const double r = robin_.alpha_f / robin_.alpha_p;
  for (int i = 0; i < size(); ++i)
    if (pinned_[i]) {
      const double cf = chi_f.size() ? chi_f[i] : 0.0, cp = chi_p.size() ? chi_p[i] : 0.0;
      s.lambda_p[i] = (cf + cp) / (1.0 + r);
      s.lambda_f[i] = s.lambda_p[i] - cp;
    }
}

Vector InterfaceProblem::apply_Gf(const Vector& lambda) const {
  return stokes_.restrict(stokes_.solve(Vector(), Vector(), lambda));
}

Vector InterfaceProblem::apply_Gp(const Vector& lambda) const {
  return darcy_.restrict(darcy_.solve(Vector(), Vector(), lambda));
}

Vector InterfaceProblem::apply(const Vector& x) const {
  const auto s = InterfaceState::from_stacked(x);
  const double af = robin_.alpha_f, ap = robin_.alpha_p, r = af / ap;
  Vector y(x.size());
  const Eigen::Index n = s.lambda_f.size();
  y.head(n) = s.lambda_f + r * s.lambda_p - (1.0 + r) * apply_Gp(s.lambda_p);
  y.tail(n) = s.lambda_p - s.lambda_f - (af + ap) * apply_Gf(s.lambda_f);
  return y;
}

InterfaceState InterfaceProblem::chi(const Vector& stokes_rhs, const Vector& stokes_dirichlet,
                                     const Vector& darcy_rhs, const Vector& darcy_dirichlet) const {
  const double af = robin_.alpha_f, ap = robin_.alpha_p;
  const Vector x_data = darcy_.restrict(darcy_.solve(darcy_rhs, darcy_dirichlet, Vector()));
  const Vector u_data = stokes_.restrict(stokes_.solve(stokes_rhs, stokes_dirichlet, Vector()));
  return {(1.0 + af / ap) * x_data, (af + ap) * u_data};
}

InterfaceState InterfaceProblem::consistent_lambdas(const Vector& stokes_state, const Vector& darcy_state) const {
  const Vector X = darcy_.restrict(darcy_state);
  const Vector U = stokes_.restrict(stokes_state);
  return {X - robin_.alpha_f * U, X + robin_.alpha_p * U};
}

std::pair<InterfaceState, IterationReport> stationary_iteration(const InterfaceProblem& prob,
                                                                const InterfaceState& state0, const Vector& chi_f,
                                                                const Vector& chi_p, const StationaryOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("tolerance must be positive");
  const auto t0 = Clock::now();
  const int n = prob.size();
  const double af = prob.robin().alpha_f, ap = prob.robin().alpha_p, r = af / ap;
  const Vector cf = chi_f.size() ? chi_f : Vector::Zero(n);
  const Vector cp = chi_p.size() ? chi_p : Vector::Zero(n);

  InterfaceState x = state0.size() ? state0 : InterfaceState::zero(n);
  prob.fix_pinned(x, cf, cp);
  IterationReport rep;
  const double norm0 = x.stacked().norm();
  if (norm0 == 0.0 && cf.norm() == 0.0 && cp.norm() == 0.0) {
    rep.converged = true;
    rep.residual_history.push_back(0.0);
    rep.wall_time = seconds_since(t0);
    return {x, rep};
  }
  if (opts.criterion == StopCriterion::RelativeToInitial && norm0 == 0.0)
    throw DomainError("relative-to-initial stopping needs a nonzero initial guess");

  for (int m = 1; m <= opts.max_iter; ++m) {
    const Vector old = x.stacked();
    const Vector lf_old = x.lambda_f;
    x.lambda_f = -r * x.lambda_p + (1.0 + r) * prob.apply_Gp(x.lambda_p) + cf;
    const Vector& lf_used = opts.variant == StationaryVariant::GaussSeidel ? x.lambda_f : lf_old;
    x.lambda_p = (af + ap) * prob.apply_Gf(lf_used) + lf_used + cp;
    prob.fix_pinned(x, cf, cp);

    const Vector now = x.stacked();
    double measure = 0.0;
    if (opts.criterion == StopCriterion::RelativeUpdate) {
      const double nn = now.norm();
      measure = nn == 0.0 ? 0.0 : (now - old).norm() / nn;
    } else {
      measure = now.norm() / norm0;
    }
    rep.residual_history.push_back(measure);
    rep.iterations = m;
    if (measure <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.wall_time = seconds_since(t0);
  return {x, rep};
}

std::pair<InterfaceState, IterationReport> interface_gmres(const InterfaceProblem& prob, const Vector& chi_f,
                                                           const Vector& chi_p, const InterfaceState& state0,
                                                           const GmresOptions& opts) {
  const auto t0 = Clock::now();
  const int n = prob.size();
  const Vector cf = chi_f.size() ? chi_f : Vector::Zero(n);
  const Vector cp = chi_p.size() ? chi_p : Vector::Zero(n);
  InterfaceState start = state0.size() ? state0 : InterfaceState::zero(n);
  prob.fix_pinned(start, cf, cp);

  // Pinned dofs are solved directly; GMRES runs on the remaining unknowns.
  std::vector<int> idx;
  for (int i = 0; i < 2 * n; ++i)
    if (!prob.pinned()[i % n]) idx.push_back(i);
  const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
  Vector fixed = start.stacked();
  for (int i : idx) fixed[i] = 0.0;
  auto gather = [&](const Vector& full) {
    Vector v(m);
    for (Eigen::Index k = 0; k < m; ++k) v[k] = full[idx[k]];
    return v;
  };
  auto scatter = [&](const Vector& v) {
    Vector full = Vector::Zero(2 * n);
    for (Eigen::Index k = 0; k < m; ++k) full[idx[k]] = v[k];
    return full;
  };
  Vector b(2 * n);
  b << cf, cp;
  const Vector b_red = gather(b - prob.apply(fixed));
  const auto res = krylov::gmres([&](const Vector& v) { return gather(prob.apply(scatter(v))); }, b_red,
                                 gather(start.stacked()), opts.tol, opts.max_iter);
  IterationReport rep;
  rep.iterations = res.iterations;
  rep.residual_history = res.residuals;
  rep.converged = res.converged;
  rep.wall_time = seconds_since(t0);
  return {InterfaceState::from_stacked(fixed + scatter(res.x)), rep};
}

// ---------------------------------------------------------------------------------------------

struct MonolithicSystem::Solver {
#ifdef SDOSM_HAVE_UMFPACK
  SparseMatrix a;  // UmfPackLU keeps pointers into the factorized matrix
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
};

MonolithicSystem::MonolithicSystem(const fem::StokesOperators& so, const fem::DarcyOperators& dop,
                                   const fem::DofMap& dofs, const PhysicalParams& p, const DiscretizationParams& d)
    : solver_(std::make_unique<Solver>()),
      ns_(dofs.stokes_size()),
      nd_(dofs.darcy_size()),
      theta_(d.theta),
      dt_(d.dt) {
  const double tdt = d.theta * d.dt;
  const SparseMatrix visc = so.viscous + so.bjs;
  const SparseMatrix a_s = so.mass + tdt * visc + d.dt * so.grad + so.div;
  darcy_storage_ = p.S_p * dop.mass;
  const SparseMatrix a_d = darcy_storage_ + tdt * dop.stiffness;
  stokes_mass_ = so.mass;
  stokes_explicit_ = (1.0 - d.theta) * d.dt * visc;
  darcy_explicit_ = (1.0 - d.theta) * d.dt * dop.stiffness;
  stokes_coupling_ = so.extension * dop.trace;   // <p_p, v.n>
  darcy_coupling_ = dop.extension * so.trace;    // <u.n, q>

  std::vector<Eigen::Triplet<double>> t;
  auto add = [&](const SparseMatrix& m, int r0, int c0, double s) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) t.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()), s * it.value());
  };
  add(a_s, 0, 0, 1.0);
  add(stokes_coupling_, 0, ns_, tdt);
  add(darcy_coupling_, ns_, 0, -tdt);
  add(a_d, ns_, ns_, 1.0);
  matrix_.resize(ns_ + nd_, ns_ + nd_);
  matrix_.setFromTriplets(t.begin(), t.end());
  matrix_.makeCompressed();

  constrained_ = dofs.stokes_constrained;
  constrained_.insert(constrained_.end(), dofs.darcy_constrained.begin(), dofs.darcy_constrained.end());
  std::vector<Eigen::Triplet<double>> pt;
  for (int i = 0; i < ns_ + nd_; ++i)
    if (!constrained_[static_cast<std::size_t>(i)]) {
      pt.emplace_back(static_cast<int>(free_.size()), i, 1.0);
      free_.push_back(i);
    }
  SparseMatrix P(static_cast<Eigen::Index>(free_.size()), ns_ + nd_);
  P.setFromTriplets(pt.begin(), pt.end());
  free_rows_ = P * matrix_;
  SparseMatrix ff = free_rows_ * SparseMatrix(P.transpose());
  ff.makeCompressed();
#ifdef SDOSM_HAVE_UMFPACK
  solver_->a = ff;
  solver_->lu.umfpackControl()(UMFPACK_IRSTEP) = 2;
  // Row-sum scaling picks bad pivots once the Robin term dominates the interface rows.
  solver_->lu.umfpackControl()(UMFPACK_SCALE) = UMFPACK_SCALE_NONE;
  solver_->lu.compute(solver_->a);
#else
  solver_->lu.compute(ff);
#endif
  if (solver_->lu.info() != Eigen::Success) throw SingularAssemblyError("monolithic factorization failed");
}

MonolithicSystem::~MonolithicSystem() = default;

std::pair<Vector, Vector> MonolithicSystem::step(const Vector& up, const Vector& pp, const Vector& fl_prev,
                                                 const Vector& fl_now, const Vector& dl_prev, const Vector& dl_now,
                                                 const Vector& sdir, const Vector& ddir) const {
  const double w_now = dt_ * theta_, w_prev = dt_ * (1.0 - theta_);
  Vector rs = Vector::Zero(ns_), rd = Vector::Zero(nd_);
  if (fl_now.size()) rs += w_now * fl_now;
  if (fl_prev.size() && theta_ < 1.0) rs += w_prev * fl_prev;
  if (dl_now.size()) rd += w_now * dl_now;
  if (dl_prev.size() && theta_ < 1.0) rd += w_prev * dl_prev;
  if (up.size()) {
    rs += stokes_mass_ * up;
    if (theta_ < 1.0) {
      rs -= stokes_explicit_ * up;
      rd += w_prev * (darcy_coupling_ * up);
    }
  }
  if (pp.size()) {
    rd += darcy_storage_ * pp;
    if (theta_ < 1.0) {
      rd -= darcy_explicit_ * pp;
      rs -= w_prev * (stokes_coupling_ * pp);
    }
  }
  Vector rhs(ns_ + nd_), xc = Vector::Zero(ns_ + nd_);
  rhs << rs, rd;
  for (int i = 0; i < ns_ + nd_; ++i) {
    if (!constrained_[static_cast<std::size_t>(i)]) continue;
    const Vector& src = i < ns_ ? sdir : ddir;
    const int j = i < ns_ ? i : i - ns_;
    if (src.size()) xc[i] = src[j];
  }
  const Vector lifted = free_rows_ * xc;
  Vector b(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) b[static_cast<Eigen::Index>(k)] = rhs[free_[k]] - lifted[static_cast<Eigen::Index>(k)];
  const Vector xf = solver_->lu.solve(b);
  if (solver_->lu.info() != Eigen::Success) throw SolverError("monolithic solve failed");
  Vector x = xc;
  for (std::size_t k = 0; k < free_.size(); ++k) x[free_[k]] = xf[static_cast<Eigen::Index>(k)];
  return {x.head(ns_), x.tail(nd_)};
}

}  // namespace sdosm::ddm

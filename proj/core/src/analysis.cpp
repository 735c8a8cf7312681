#include "sdosm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sdosm/errors.hpp"

namespace sdosm::analysis {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kDegenerateTol = 1e-10;
const double kGoldenSqrt5Term = (std::sqrt(5.0) - 1.0) / 2.0;  // z* = k_hat^2 * mu*theta*dt

// Precomputed constants of the symbols for one (p, d) pair.
struct Model {
  double eta_p;
  double a;    // 1 / (mu_f * theta * dt)
  double b;    // S_p / (eta2 * theta * dt)
  double sdt;  // time factor of the Stokes symbols (convention dependent)
  double mu;
  double xi;
  double k_hat;
  double l;

  Model(const PhysicalParams& p, const DiscretizationParams& d) {
    p.validate();
    if (!(d.theta > 0.0) || !(d.dt > 0.0)) throw DomainError("theta*dt must be positive");
    eta_p = p.eta_p();
    a = 1.0 / (p.mu_f * d.theta_dt());
    b = p.S_p / (p.eta2 * d.theta_dt());
    sdt = d.symbol_dt();
    mu = p.mu_f;
    xi = p.xi_f;
    k_hat = std::sqrt(kGoldenSqrt5Term * a);
    l = H(k_hat);
  }

  double G(double k) const {
    const double q = k * k + b;
    if (q == 0.0) throw DomainError("G(0) is unbounded when S_p = 0");
    return 1.0 / (eta_p * std::sqrt(q));
  }

  // Simplified H, written with c - |k| = a / (c + |k|) to avoid cancellation.
  double H(double k) const {
    k = std::abs(k);
    if (k == 0.0) throw DomainError("H is undefined at k = 0");
    const double c = std::sqrt(k * k + a);
    return c * (c + k) / (k * sdt * a);
  }

  double F(double k) const {
    k = std::abs(k);
    if (k == 0.0) throw DomainError("F is undefined at k = 0");
    const double c = std::sqrt(k * k + a);
    if (xi == kInfinity) return c / (k * k * sdt);
    return (mu * k * k + (mu * c + xi) * c) / (k * k * sdt * (2.0 * mu * k + xi));
  }

  double H_full(double k) const {
    k = std::abs(k);
    if (xi == kInfinity) return H(k);
    const double c = std::sqrt(k * k + a);
    const double f = F(k);
    return (2.0 * mu * c - (2.0 * mu * k * k * sdt + 1.0) * f) / (1.0 - k * sdt * f);
  }

  double rho(double k, double af, double ap) const {
    const double gk = G(k);
    const double hk = H(k);
    return (gk - af) / (hk + af) * ((hk - ap) / (gk + ap));
  }

  double R(double k, double s) const { return std::abs(rho(k, G(s), l)); }
};

template <class F>
double bisect(F f, double lo, double hi, const char* what) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw SolverError(std::string("no sign change bracketed for ") + what);
  for (int it = 0; it < 400 && (hi - lo) > kRootTol * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section maximization of g over [lo, hi] in log-coordinates.
template <class G>
double golden_max_log(G g, double lo, double hi, double rel_tol = kRootTol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double u0 = std::log(lo), u1 = std::log(hi);
  double x1 = u1 - r * (u1 - u0), x2 = u0 + r * (u1 - u0);
  double g1 = g(std::exp(x1)), g2 = g(std::exp(x2));
  for (int it = 0; it < 300 && (u1 - u0) > rel_tol; ++it) {
    if (g1 < g2) {
      u0 = x1;
      x1 = x2;
      g1 = g2;
      x2 = u0 + r * (u1 - u0);
      g2 = g(std::exp(x2));
    } else {
      u1 = x2;
      x2 = x1;
      g2 = g1;
      x1 = u1 - r * (u1 - u0);
      g1 = g(std::exp(x1));
    }
  }
  return std::exp(0.5 * (u0 + u1));
}

double interior_max(const Model& m, double s) {
  if (std::abs(s - m.k_hat) < kDegenerateTol * std::max(1.0, m.k_hat)) return m.k_hat;
  const double lo = std::min(s, m.k_hat), hi = std::max(s, m.k_hat);
  const double gs = m.G(s);
  return golden_max_log([&](double k) { return std::abs(m.rho(k, gs, m.l)); }, lo, hi);
}

double zero_mode_sigma(const Model& m, const PhysicalParams& p, const DiscretizationParams& d,
                       std::optional<double> depth) {
  const double kappa = std::sqrt(p.S_p / (p.eta2 * d.theta_dt()));
  if (!depth) {
    if (p.S_p == 0.0) throw DomainError("k = 0 factor degenerates when S_p = 0");
    return m.eta_p * kappa;
  }
  const double x = kappa * *depth;
  // kappa * coth(kappa * d), with the small-argument limit 1/d
  const double kc = x < 1e-6 ? (1.0 + x * x / 3.0) / *depth : kappa / std::tanh(x);
  return m.eta_p * kc;
}

double rho_zero(double af, double ap, double sigma) { return (1.0 - af * sigma) / (1.0 + ap * sigma); }

struct ActiveSet {
  double r_min, r_max, r_int;
  bool interior_in_band;
  double k_tilde;
};

ActiveSet active_values(const Model& m, double s, const FrequencyBand& band) {
  ActiveSet a{};
  a.r_min = m.R(band.k_min, s);
  a.r_max = m.R(band.k_max, s);
  a.k_tilde = interior_max(m, s);
  a.interior_in_band = a.k_tilde > band.k_min && a.k_tilde < band.k_max;
  a.r_int = a.interior_in_band ? m.R(a.k_tilde, s) : 0.0;
  return a;
}

Regime regime_of(const Model& m, const FrequencyBand& band) {
  const double tol = 1e-12;
  if (m.k_hat < band.k_min * (1.0 - tol)) return Regime::BelowBand;
  if (m.k_hat > band.k_max * (1.0 + tol)) return Regime::AboveBand;
  return Regime::InBand;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

MinMaxSolution finish(const Model& m, const PhysicalParams& p, const DiscretizationParams& d,
                      const FrequencyBand& band, double s, Provenance prov) {
  MinMaxSolution sol;
  sol.s_star = s;
  sol.robin = robin_from_s(s, p, d, prov);
  sol.rho_max = band_objective(s, p, d, band);
  sol.case_label = label_solution(s, p, d, band);
  if (std::abs(s - m.k_hat) >= kDegenerateTol * std::max(1.0, m.k_hat)) sol.k_tilde = interior_max(m, s);
  return sol;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::BelowBand: return "BelowBand";
    case Regime::InBand: return "InBand";
    case Regime::AboveBand: return "AboveBand";
  }
  return "?";
}

std::string to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::Equioscillate_kmin_kmax: return "Equioscillate_kmin_kmax";
    case CaseLabel::Equioscillate_kmin_interior: return "Equioscillate_kmin_interior";
    case CaseLabel::Equioscillate_interior_kmax: return "Equioscillate_interior_kmax";
    case CaseLabel::BandAbove_kmin_kmax: return "BandAbove_kmin_kmax";
    case CaseLabel::BandAbove_interior: return "BandAbove_interior";
    case CaseLabel::BandBelow_kmin_kmax: return "BandBelow_kmin_kmax";
    case CaseLabel::BandBelow_interior: return "BandBelow_interior";
  }
  return "?";
}

double symbol_G(double k, const PhysicalParams& p, const DiscretizationParams& d) {
  return Model(p, d).G(k);
}

double symbol_F(double k, const PhysicalParams& p, const DiscretizationParams& d) {
  return Model(p, d).F(k);
}

double symbol_H(double k, const PhysicalParams& p, const DiscretizationParams& d, bool simplified) {
  if (k == 0.0) throw DomainError("H is undefined at k = 0");
  const Model m(p, d);
  return simplified ? m.H(k) : m.H_full(k);
}

double critical_frequency(const PhysicalParams& p, const DiscretizationParams& d) { return Model(p, d).k_hat; }

double anchor_l(const PhysicalParams& p, const DiscretizationParams& d) { return Model(p, d).l; }

double rho(double k, double s, const PhysicalParams& p, const DiscretizationParams& d) {
  if (k == 0.0) throw DomainError("use rho_at_zero for k = 0");
  const Model m(p, d);
  return m.rho(k, m.G(s), m.l);
}

double rho(double k, const RobinPair& robin, const PhysicalParams& p, const DiscretizationParams& d) {
  if (k == 0.0) throw DomainError("use rho_at_zero for k = 0");
  return Model(p, d).rho(k, robin.alpha_f, robin.alpha_p);
}

double rho_at_zero(const RobinPair& robin, const PhysicalParams& p, const DiscretizationParams& d,
                   std::optional<double> depth) {
  const Model m(p, d);
  return rho_zero(robin.alpha_f, robin.alpha_p, zero_mode_sigma(m, p, d, depth));
}

Regime classify_regime(const PhysicalParams& p, const DiscretizationParams& d, const FrequencyBand& band) {
  band.validate();
  return regime_of(Model(p, d), band);
}

double interior_maximum(double s, const PhysicalParams& p, const DiscretizationParams& d) {
  if (!(s > 0.0)) throw DomainError("s must be positive");
  return interior_max(Model(p, d), s);
}

double band_objective(double s, const PhysicalParams& p, const DiscretizationParams& d,
                      const FrequencyBand& band) {
  const Model m(p, d);
  const ActiveSet a = active_values(m, s, band);
  double v = std::max({a.r_min, a.r_max, a.r_int});
  if (band.include_zero)
    v = std::max(v, std::abs(rho_zero(m.G(s), m.l, zero_mode_sigma(m, p, d, band.zero_mode_depth))));
  return v;
}

RobinPair robin_from_s(double s, const PhysicalParams& p, const DiscretizationParams& d, Provenance prov) {
  const Model m(p, d);
  return RobinPair{m.G(s), m.l, prov};
}

CaseLabel label_solution(double s, const PhysicalParams& p, const DiscretizationParams& d,
                         const FrequencyBand& band) {
  const Model m(p, d);
  const ActiveSet a = active_values(m, s, band);
  const double top = std::max({a.r_min, a.r_max, a.r_int});
  auto active = [&](double v) { return v >= top * (1.0 - 1e-6) && v > 0.0; };
  const bool int_active = a.interior_in_band && active(a.r_int);
  switch (regime_of(m, band)) {
    case Regime::BelowBand:
      return int_active ? CaseLabel::BandBelow_interior : CaseLabel::BandBelow_kmin_kmax;
    case Regime::AboveBand:
      return int_active ? CaseLabel::BandAbove_interior : CaseLabel::BandAbove_kmin_kmax;
    case Regime::InBand:
      break;
  }
  if (!int_active) return CaseLabel::Equioscillate_kmin_kmax;
  const bool min_active = active(a.r_min), max_active = active(a.r_max);
  if (min_active && max_active) return CaseLabel::Equioscillate_kmin_kmax;
  if (min_active) return CaseLabel::Equioscillate_kmin_interior;
  if (max_active) return CaseLabel::Equioscillate_interior_kmax;
  return a.r_min >= a.r_max ? CaseLabel::Equioscillate_kmin_interior : CaseLabel::Equioscillate_interior_kmax;
}

MinMaxSolution solve_minmax_theorem(const PhysicalParams& p, const DiscretizationParams& d,
                                    const FrequencyBand& band) {
  band.validate();
  if (band.include_zero) throw DomainError("the theorem solver does not cover k = 0; use the numeric solver");
  const Model m(p, d);
  const double kmin = band.k_min, kmax = band.k_max;
  auto R = [&](double k, double s) { return m.R(k, s); };
  auto Rint = [&](double s) { return R(interior_max(m, s), s); };

  const double s1 = bisect([&](double s) { return R(kmin, s) - R(kmax, s); }, kmin, kmax, "s1");
  const double M = R(kmin, s1);
  const double kt1 = interior_max(m, s1);

  double s_star = s1;
  CaseLabel label = CaseLabel::Equioscillate_kmin_kmax;
  switch (regime_of(m, band)) {
    case Regime::InBand:
      if (R(kt1, s1) <= M) {
        label = CaseLabel::Equioscillate_kmin_kmax;
      } else if (s1 < m.k_hat) {
        s_star = bisect([&](double s) { return R(kmin, s) - Rint(s); }, s1, m.k_hat, "s2");
        label = CaseLabel::Equioscillate_kmin_interior;
      } else {
        s_star = bisect([&](double s) { return R(kmax, s) - Rint(s); }, m.k_hat, s1, "s3");
        label = CaseLabel::Equioscillate_interior_kmax;
      }
      break;
    case Regime::AboveBand:
      if (kt1 >= kmax) {
        label = CaseLabel::BandAbove_kmin_kmax;
      } else {
        auto right = [&](double s) {
          const double kt = interior_max(m, s);
          return kt < kmax ? R(kt, s) : R(kmax, s);
        };
        s_star = bisect([&](double s) { return R(kmin, s) - right(s); }, s1, kmax, "s4");
        label = interior_max(m, s_star) < kmax ? CaseLabel::BandAbove_interior : CaseLabel::BandAbove_kmin_kmax;
      }
      break;
    case Regime::BelowBand:
      if (kt1 <= kmin) {
        label = CaseLabel::BandBelow_kmin_kmax;
      } else {
        auto left = [&](double s) {
          const double kt = interior_max(m, s);
          return kt > kmin ? R(kt, s) : R(kmin, s);
        };
        s_star = bisect([&](double s) { return left(s) - R(kmax, s); }, kmin, s1, "s5");
        label = interior_max(m, s_star) > kmin ? CaseLabel::BandBelow_interior : CaseLabel::BandBelow_kmin_kmax;
      }
      break;
  }

  MinMaxSolution sol = finish(m, p, d, band, s_star, Provenance::TheoremSolver);
  sol.case_label = label;
  if (!(sol.rho_max < 1.0)) throw SolverError("optimized convergence factor is not below one");
  return sol;
}

MinMaxSolution solve_minmax_numeric(const PhysicalParams& p, const DiscretizationParams& d,
                                    const FrequencyBand& band, const NumericOptions& opts) {
  band.validate();
  if (opts.k_grid_size < 2) throw DomainError("k grid needs at least two points");
  const Model m(p, d);
  const auto ks = log_grid(band.k_min, band.k_max, opts.k_grid_size);
  std::vector<double> gk(ks.size()), hk(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    gk[i] = m.G(ks[i]);
    hk[i] = m.H(ks[i]);
  }
  const double sigma0 = band.include_zero ? zero_mode_sigma(m, p, d, band.zero_mode_depth) : 0.0;

  auto objective = [&](std::span<const double> x) {
    const double gs = m.G(std::exp(x[0]));
    double v = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i)
      v = std::max(v, std::abs((gk[i] - gs) / (hk[i] + gs) * ((hk[i] - m.l) / (gk[i] + m.l))));
    if (band.include_zero) v = std::max(v, std::abs(rho_zero(gs, m.l, sigma0)));
    return v;
  };

  const double lmin = std::log(band.k_min), lmax = std::log(band.k_max);
  std::vector<std::vector<double>> start{{lmin}, {0.5 * (lmin + lmax)}, {lmax}};
  std::vector<double> fv;
  for (const auto& x : start) fv.push_back(objective(x));
  std::vector<std::size_t> idx{0, 1, 2};
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
  std::vector<std::vector<double>> simplex{start[idx[0]], start[idx[1]]};

  const NelderMeadResult r = nelder_mead(objective, simplex, opts.nelder_mead);
  if (!r.converged) throw SolverError("Nelder-Mead did not converge within the iteration cap");
  MinMaxSolution sol = finish(m, p, d, band, std::exp(r.x[0]), Provenance::NumericSolver);
  if (!(sol.rho_max < 1.0)) throw SolverError("optimized convergence factor is not below one");
  return sol;
}

MinMaxSolution brute_force_minmax(const PhysicalParams& p, const DiscretizationParams& d,
                                  const FrequencyBand& band, int s_grid_size, int k_grid_size) {
  band.validate();
  if (s_grid_size < 100 || k_grid_size < 100) throw DomainError("brute-force grids need at least 100 points");
  const Model m(p, d);
  const auto ks = log_grid(band.k_min, band.k_max, k_grid_size);
  std::vector<double> gk(ks.size()), hk(ks.size()), vals(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    gk[i] = m.G(ks[i]);
    hk[i] = m.H(ks[i]);
  }
  const double sigma0 = band.include_zero ? zero_mode_sigma(m, p, d, band.zero_mode_depth) : 0.0;

  auto inner = [&](double s) {
    const double gs = m.G(s);
    for (std::size_t i = 0; i < ks.size(); ++i)
      vals[i] = std::abs((gk[i] - gs) / (hk[i] + gs) * ((hk[i] - m.l) / (gk[i] + m.l)));
    double v = std::max(vals.front(), vals.back());
    for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
      if (vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1]) {
        auto f = [&](double k) { return std::abs(m.rho(k, gs, m.l)); };
        v = std::max(v, f(golden_max_log(f, ks[i - 1], ks[i + 1], 1e-14)));
        v = std::max(v, vals[i]);
      }
    }
    if (band.include_zero) v = std::max(v, std::abs(rho_zero(gs, m.l, sigma0)));
    return v;
  };

  // The zero mode pulls the optimum below k_min, so widen the scanned range in that case.
  double lo = std::log(band.include_zero ? band.k_min * 1e-3 : band.k_min);
  double hi = std::log(band.k_max);
  double best_s = std::exp(lo);
  for (int round = 0; round < 80 && hi - lo > 1e-14; ++round) {
    double best_v = kInfinity;
    int best_j = 0;
    for (int j = 0; j < s_grid_size; ++j) {
      const double x = lo + (hi - lo) * j / (s_grid_size - 1);
      const double v = inner(std::exp(x));
      if (v < best_v) {
        best_v = v;
        best_j = j;
        best_s = std::exp(x);
      }
    }
    const double step = (hi - lo) / (s_grid_size - 1);
    const double new_lo = lo + step * std::max(best_j - 1, 0);
    const double new_hi = lo + step * std::min(best_j + 1, s_grid_size - 1);
    lo = new_lo;
    hi = new_hi;
  }
  MinMaxSolution sol = finish(m, p, d, band, best_s, Provenance::Manual);
  sol.rho_max = inner(best_s);
  return sol;
}

PhysicalParams derive_dimensionless(const DimensionalInputs& in) {
  if (!(in.Re > 0 && in.S0 > 0 && in.K > 0 && in.Xf > 0 && in.nu > 0 && in.g > 0 && in.alpha_BJ > 0))
    throw DomainError("dimensional inputs must be positive");
  PhysicalParams p;
  p.mu_f = 1.0 / in.Re;
  p.S_p = in.nu * in.nu * (in.S0 / in.g) * (in.Re * in.Re) / (in.Xf * in.Xf);
  p.eta1 = p.eta2 = in.K / (in.Xf * in.Xf) * in.Re;
  p.xi_f = in.alpha_BJ * std::sqrt(p.mu_f / p.eta1);
  return p;
}

DimensionalInputs test_case_inputs(TestCase t) {
  DimensionalInputs in;
  switch (t) {
    case TestCase::A: in.Re = 0.1; in.S0 = 1e-3; in.K = 1e-11; break;
    case TestCase::B: in.Re = 1.0; in.S0 = 1e-4; in.K = 1e-9; break;
    case TestCase::C: in.Re = 0.1; in.S0 = 1e-5; in.K = 1e-10; break;
    case TestCase::D: in.Re = 5.0; in.S0 = 1e-5; in.K = 1e-10; break;
  }
  return in;
}

PhysicalParams test_case_params(TestCase t) { return derive_dimensionless(test_case_inputs(t)); }

}  // namespace sdosm::analysis

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sdosm/analysis.hpp"
#include "sdosm/random.hpp"

namespace sdosm::testing {

struct Draw {
  PhysicalParams p;
  DiscretizationParams d;
  FrequencyBand band;
  analysis::Regime target;
};

// Random parameter sets with k_hat placed below, inside or above the band in turn.
inline std::vector<Draw> regime_draws(int n, std::uint64_t seed) {
  Lcg64 rng(seed);
  auto log_uniform = [&](double a, double b) { return std::exp(rng.uniform(std::log(a), std::log(b))); };
  std::vector<Draw> out;
  for (int i = 0; i < n; ++i) {
    Draw w;
    w.target = static_cast<analysis::Regime>(i % 3);
    w.p.eta1 = w.p.eta2 = log_uniform(1e-10, 1e-6);
    w.p.S_p = log_uniform(1e-18, 1e-13);
    w.p.xi_f = kInfinity;
    w.d.theta = rng.uniform() < 0.5 ? 0.5 : 1.0;
    w.d.dt = log_uniform(1e-3, 0.1);
    w.d.gamma_len = rng.uniform() < 0.5 ? 0.5 : 1.0;
    const int cells = 5 + static_cast<int>(rng.uniform() * 60.0);
    w.d.h = w.d.gamma_len / cells;
    w.d.time_factor_convention =
        rng.uniform() < 0.5 ? TimeFactorConvention::AsPrinted : TimeFactorConvention::EffectiveThetaDt;
    w.band = FrequencyBand::from_discretization(w.d, rng.uniform() < 0.5 ? 1.0 : 2.0);
    double k_hat = 0.0;
    switch (w.target) {
      case analysis::Regime::BelowBand: k_hat = w.band.k_min * rng.uniform(0.1, 0.95); break;
      case analysis::Regime::InBand: k_hat = log_uniform(w.band.k_min * 1.05, w.band.k_max * 0.95); break;
      case analysis::Regime::AboveBand: k_hat = w.band.k_max * rng.uniform(1.05, 5.0); break;
    }
    // k_hat^2 mu theta dt = (sqrt(5) - 1) / 2
    w.p.mu_f = (std::sqrt(5.0) - 1.0) / 2.0 / (k_hat * k_hat * w.d.theta_dt());
    out.push_back(w);
  }
  return out;
}

// |rho| values the case label says should equioscillate.
inline std::pair<double, double> equioscillating_pair(const analysis::MinMaxSolution& sol, const PhysicalParams& p,
                                                      const DiscretizationParams& d, const FrequencyBand& band) {
  using analysis::CaseLabel;
  const double s = sol.s_star;
  const double r_min = std::abs(analysis::rho(band.k_min, s, p, d));
  const double r_max = std::abs(analysis::rho(band.k_max, s, p, d));
  const double kt = analysis::interior_maximum(s, p, d);
  const double r_int = (kt > band.k_min && kt < band.k_max) ? std::abs(analysis::rho(kt, s, p, d)) : 0.0;
  switch (sol.case_label) {
    case CaseLabel::Equioscillate_kmin_kmax:
    case CaseLabel::BandAbove_kmin_kmax:
    case CaseLabel::BandBelow_kmin_kmax: return {r_min, r_max};
    case CaseLabel::Equioscillate_kmin_interior: return {r_min, r_int};
    case CaseLabel::Equioscillate_interior_kmax: return {r_int, r_max};
    case CaseLabel::BandAbove_interior:
    case CaseLabel::BandBelow_interior: return {r_int, std::max(r_min, r_max)};
  }
  return {0.0, 0.0};
}

}  // namespace sdosm::testing

#pragma once

#include <optional>
#include <string>

#include "sdosm/nelder_mead.hpp"
#include "sdosm/params.hpp"

namespace sdosm::analysis {

enum class Regime { BelowBand, InBand, AboveBand };

enum class CaseLabel {
  Equioscillate_kmin_kmax,
  Equioscillate_kmin_interior,
  Equioscillate_interior_kmax,
  BandAbove_kmin_kmax,
  BandAbove_interior,
  BandBelow_kmin_kmax,
  BandBelow_interior,
};

std::string to_string(Regime r);
std::string to_string(CaseLabel c);

struct MinMaxSolution {
  double s_star = 0.0;
  RobinPair robin;
  double rho_max = 0.0;
  CaseLabel case_label = CaseLabel::Equioscillate_kmin_kmax;
  std::optional<double> k_tilde;
};

// Fourier symbols of the two subdomain solves (k != 0).
double symbol_G(double k, const PhysicalParams& p, const DiscretizationParams& d);
double symbol_F(double k, const PhysicalParams& p, const DiscretizationParams& d);
double symbol_H(double k, const PhysicalParams& p, const DiscretizationParams& d, bool simplified);

// Minimizer of the simplified H and its value there.
double critical_frequency(const PhysicalParams& p, const DiscretizationParams& d);
double anchor_l(const PhysicalParams& p, const DiscretizationParams& d);

// Convergence factor with alpha_f = G(s), alpha_p = l.
double rho(double k, double s, const PhysicalParams& p, const DiscretizationParams& d);
// Convergence factor for an arbitrary pair (simplified H).
double rho(double k, const RobinPair& robin, const PhysicalParams& p, const DiscretizationParams& d);

// Factor of the k = 0 mode. Without a depth this is the half-plane limit; with a
// porous depth d the Darcy symbol eta*kappa*coth(kappa*d) replaces eta*kappa.
double rho_at_zero(const RobinPair& robin, const PhysicalParams& p, const DiscretizationParams& d,
                   std::optional<double> depth = std::nullopt);

Regime classify_regime(const PhysicalParams& p, const DiscretizationParams& d, const FrequencyBand& band);

// Location of the maximum of |rho(., s)| between its two zeros s and k_hat.
double interior_maximum(double s, const PhysicalParams& p, const DiscretizationParams& d);

// Exact max over the band of |rho(., s)| (uses the zero/peak structure), plus k = 0 if requested.
double band_objective(double s, const PhysicalParams& p, const DiscretizationParams& d,
                      const FrequencyBand& band);

RobinPair robin_from_s(double s, const PhysicalParams& p, const DiscretizationParams& d, Provenance prov);

MinMaxSolution solve_minmax_theorem(const PhysicalParams& p, const DiscretizationParams& d,
                                    const FrequencyBand& band);

struct NumericOptions {
  int k_grid_size = 4096;
  NelderMeadOptions nelder_mead{};
};

MinMaxSolution solve_minmax_numeric(const PhysicalParams& p, const DiscretizationParams& d,
                                    const FrequencyBand& band, const NumericOptions& opts = {});

MinMaxSolution brute_force_minmax(const PhysicalParams& p, const DiscretizationParams& d,
                                  const FrequencyBand& band, int s_grid_size, int k_grid_size);

// Case label of an arbitrary s (which maxima of |rho| are active).
CaseLabel label_solution(double s, const PhysicalParams& p, const DiscretizationParams& d,
                         const FrequencyBand& band);

struct DimensionalInputs {
  double Re = 1.0;
  double S0 = 1e-4;     // 1/m
  double K = 1e-9;      // m^2
  double Xf = 0.05;     // m
  double nu = 1e-6;     // m^2/s
  double g = 9.8;       // m/s^2
  double alpha_BJ = 1.0;
};

PhysicalParams derive_dimensionless(const DimensionalInputs& in);

// Dimensional inputs and resulting parameters of the four reference cases.
DimensionalInputs test_case_inputs(TestCase t);
PhysicalParams test_case_params(TestCase t);

}  // namespace sdosm::analysis

#pragma once

#include <limits>
#include <optional>
#include <string>

namespace sdosm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Dimensionless coefficients of the coupled Stokes-Darcy model.
struct PhysicalParams {
  double mu_f = 1.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double S_p = 0.0;
  double xi_f = kInfinity;  // +inf: zero tangential velocity on the interface

  double eta_p() const;  // sqrt(eta1 * eta2)
  bool no_slip_interface() const { return xi_f == kInfinity; }
  void validate() const;
};

// How the explicit time step enters the Stokes symbols F and H.
//   AsPrinted:        dt
//   EffectiveThetaDt: theta * dt (the symbol of the theta-scheme as implemented)
enum class TimeFactorConvention { AsPrinted, EffectiveThetaDt };

std::string to_string(TimeFactorConvention c);
TimeFactorConvention parse_time_factor_convention(const std::string& s);

struct DiscretizationParams {
  double theta = 1.0;
  double dt = 0.01;
  double h = 0.1;
  double gamma_len = 1.0;
  TimeFactorConvention time_factor_convention = TimeFactorConvention::EffectiveThetaDt;

  double theta_dt() const { return theta * dt; }
  double symbol_dt() const;  // dt or theta*dt, per convention
  void validate() const;
};

// Frequencies [k_min, k_max] (plus optionally k = 0) entering the min-max problem.
struct FrequencyBand {
  double k_min = 1.0;
  double k_max = 2.0;
  bool include_zero = false;
  // Depth of the porous layer used for the k = 0 factor; empty means a half-plane.
  std::optional<double> zero_mode_depth;

  void validate() const;

  // k_min = pi/|Gamma|, k_max = multiplier * pi / h.
  static FrequencyBand from_discretization(const DiscretizationParams& d, double multiplier = 1.0,
                                           bool include_zero = false,
                                           std::optional<double> zero_mode_depth = std::nullopt);
};

enum class Provenance { TheoremSolver, NumericSolver, Manual };
std::string to_string(Provenance p);

struct RobinPair {
  double alpha_f = 1.0;
  double alpha_p = 1.0;
  Provenance provenance = Provenance::Manual;

  void validate() const;
};

enum class TestCase { A, B, C, D };
std::string to_string(TestCase t);
TestCase parse_test_case(const std::string& s);

}  // namespace sdosm

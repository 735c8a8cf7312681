#include "sdosm/params.hpp"

#include <cmath>
#include <numbers>

#include "sdosm/errors.hpp"

namespace sdosm {

double PhysicalParams::eta_p() const { return std::sqrt(eta1 * eta2); }

void PhysicalParams::validate() const {
  if (!(mu_f > 0.0)) throw DomainError("mu_f must be positive");
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw DomainError("eta1 and eta2 must be positive");
  if (!(S_p >= 0.0) || !std::isfinite(S_p)) throw DomainError("S_p must be finite and nonnegative");
  if (!(xi_f > 0.0)) throw DomainError("xi_f must be positive (or infinite)");
}

std::string to_string(TimeFactorConvention c) {
  return c == TimeFactorConvention::AsPrinted ? "AsPrinted" : "EffectiveThetaDt";
}

TimeFactorConvention parse_time_factor_convention(const std::string& s) {
  if (s == "AsPrinted" || s == "as-printed" || s == "printed") return TimeFactorConvention::AsPrinted;
  if (s == "EffectiveThetaDt" || s == "effective" || s == "effective-theta-dt")
    return TimeFactorConvention::EffectiveThetaDt;
  throw DomainError("unknown time-factor convention: " + s);
}

double DiscretizationParams::symbol_dt() const {
  return time_factor_convention == TimeFactorConvention::AsPrinted ? dt : theta * dt;
}

void DiscretizationParams::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(h > 0.0)) throw DomainError("h must be positive");
  if (!(gamma_len > 0.0)) throw DomainError("gamma_len must be positive");
  if (!(h < gamma_len)) throw DomainError("h must be smaller than the interface length");
}

void FrequencyBand::validate() const {
  if (!(k_min > 0.0 && k_min < k_max) || !std::isfinite(k_max))
    throw DomainError("frequency band requires 0 < k_min < k_max");
  if (zero_mode_depth && !(*zero_mode_depth > 0.0)) throw DomainError("zero-mode depth must be positive");
}

FrequencyBand FrequencyBand::from_discretization(const DiscretizationParams& d, double multiplier,
                                                 bool include_zero, std::optional<double> zero_mode_depth) {
  d.validate();
  if (!(multiplier > 0.0)) throw DomainError("band multiplier must be positive");
  FrequencyBand b;
  b.k_min = std::numbers::pi / d.gamma_len;
  b.k_max = multiplier * std::numbers::pi / d.h;
  b.include_zero = include_zero;
  b.zero_mode_depth = zero_mode_depth;
  b.validate();
  return b;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::TheoremSolver: return "TheoremSolver";
    case Provenance::NumericSolver: return "NumericSolver";
    case Provenance::Manual: return "Manual";
  }
  return "?";
}

void RobinPair::validate() const {
  if (!(alpha_f > 0.0) || !std::isfinite(alpha_f)) throw DomainError("alpha_f must be positive");
  if (!(alpha_p > 0.0) || !std::isfinite(alpha_p)) throw DomainError("alpha_p must be positive");
}

std::string to_string(TestCase t) {
  switch (t) {
    case TestCase::A: return "A";
    case TestCase::B: return "B";
    case TestCase::C: return "C";
    case TestCase::D: return "D";
  }
  return "?";
}

TestCase parse_test_case(const std::string& s) {
  if (s == "A" || s == "a") return TestCase::A;
  if (s == "B" || s == "b") return TestCase::B;
  if (s == "C" || s == "c") return TestCase::C;
  if (s == "D" || s == "d") return TestCase::D;
  throw DomainError("unknown test case: " + s);
}

}  // namespace sdosm

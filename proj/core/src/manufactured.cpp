#include "sdosm/manufactured.hpp"

#include <cmath>

namespace sdosm::timeloop {

ManufacturedValues manufactured_fields(double t, double a, const PhysicalParams& p, double x, double y) {
  const double mu = p.mu_f, eta = p.eta_p();
  const double c = std::cos(t), s = std::sin(t);
  const double pp_hat = (-a * x * (y - 1.0) + y * y * y / 3.0 - y * y + y) / eta + 2.0 * mu * x;
  ManufacturedValues v{};
  v.u_f = {std::sqrt(mu * eta) * c, a * x * c};
  v.p_f = (2.0 * mu * (x + y - 1.0) + 1.0 / (3.0 * eta)) * c;
  v.p_p = pp_hat * c;
  v.stress = {-v.p_f, mu * a * c, -v.p_f};
  // The velocity is linear, so the viscous term vanishes: f_f = du/dt + grad p_f.
  v.f_f = {-std::sqrt(mu * eta) * s + 2.0 * mu * c, -a * x * s + 2.0 * mu * c};
  // div(eta grad p_p) = 2 (y - 1) cos t.
  v.f_p = -p.S_p * pp_hat * s - 2.0 * (y - 1.0) * c;
  return v;
}

}  // namespace sdosm::timeloop

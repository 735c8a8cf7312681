#pragma once

#include <array>

#include "sdosm/params.hpp"

namespace sdosm::timeloop {

struct ManufacturedValues {
  std::array<double, 2> u_f;
  double p_f;
  double p_p;
  std::array<double, 3> stress;  // 2 mu eps(u_f) - p_f I as (xx, xy, yy)
  std::array<double, 2> f_f;
  double f_p;
};

// Closed-form solution of the coupled problem used for verification (eta1 = eta2 assumed):
//   u_f = (sqrt(mu eta) cos t, a x cos t)
//   p_f = (2 mu (x + y - 1) + 1/(3 eta)) cos t
//   p_p = ((-a x (y-1) + y^3/3 - y^2 + y)/eta + 2 mu x) cos t
// It satisfies the interface conditions on y = 1 when xi_f = a sqrt(mu/eta).
ManufacturedValues manufactured_fields(double t, double alpha_BJ, const PhysicalParams& p, double x, double y);

}  // namespace sdosm::timeloop

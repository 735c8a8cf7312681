#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sdosm {

struct NelderMeadOptions {
  int max_iterations = 500;
  double diameter_tol = 1e-10;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Derivative-free minimization from an explicit initial simplex (n+1 points in R^n).
NelderMeadResult nelder_mead(const Objective& f, std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& opts = {});

}  // namespace sdosm

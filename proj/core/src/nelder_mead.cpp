#include "sdosm/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdosm/errors.hpp"

namespace sdosm {

namespace {

double diameter(const std::vector<std::vector<double>>& s) {
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < s[i].size(); ++c) acc += (s[i][c] - s[j][c]) * (s[i][c] - s[j][c]);
      d = std::max(d, std::sqrt(acc));
    }
  return d;
}

std::vector<double> affine(const std::vector<double>& a, const std::vector<double>& b, double t) {
  // a + t * (b - a)
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
  return r;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& opts) {
  const std::size_t n = simplex.empty() ? 0 : simplex.front().size();
  if (n == 0 || simplex.size() != n + 1) throw DomainError("Nelder-Mead needs n+1 points in R^n");

  std::vector<double> fv(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = f(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      f2.push_back(fv[i]);
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };

  NelderMeadResult res;
  sort_simplex();
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (diameter(simplex) <= opts.diameter_tol) {
      res.converged = true;
      res.iterations = it;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < n; ++c) centroid[c] += simplex[i][c] / static_cast<double>(n);

    const auto& worst = simplex[n];
    auto xr = affine(centroid, worst, -opts.reflection);
    double fr = f(xr);
    if (fr < fv[0]) {
      auto xe = affine(centroid, worst, -opts.reflection * opts.expansion);
      double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      auto xc = outside ? affine(centroid, xr, opts.contraction) : affine(centroid, worst, opts.contraction);
      double fc = f(xc);
      if (fc < (outside ? fr : fv[n]) || (fc <= (outside ? fr : fv[n]) && fc <= fv[0])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          simplex[i] = affine(simplex[0], simplex[i], opts.shrink);
          fv[i] = f(simplex[i]);
        }
      }
    }
    sort_simplex();
    res.iterations = it + 1;
  }
  if (!res.converged && diameter(simplex) <= opts.diameter_tol) res.converged = true;
  res.x = simplex[0];
  res.value = fv[0];
  return res;
}

}  // namespace sdosm

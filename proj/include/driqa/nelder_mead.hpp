#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace driqa {

struct NelderMeadOptions {
  int max_iterations = 5000;
  double diameter_tol = 1e-10;  // stop when every vertex is this close to the best one
  double initial_step = 0.1;    // relative step per coordinate (absolute when the coordinate is ~0)
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization with the standard reflection (1),
/// expansion (2), contraction (1/2) and shrink (1/2) coefficients.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                    std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  auto f = [&](const std::vector<double>& x) {
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = std::abs(x0[i]) > 1e-8 ? opt.initial_step * x0[i] : 0.00025;
    s[i + 1][i] += step;
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = std::move(s[order[i]]);
      f2[i] = fv[order[i]];
    }
    s.swap(s2);
    fv.swap(f2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(s[i][j] - s[0][j]));
    return d;
  };
  auto combine = [&](const std::vector<double>& c, const std::vector<double>& p, double t) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = c[j] + t * (p[j] - c[j]);
    return out;
  };

  NelderMeadResult res;
  sort_simplex();
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (diameter() < opt.diameter_tol) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += s[i][j] / static_cast<double>(n);
    const auto xr = combine(centroid, s[n], -1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const auto xe = combine(centroid, s[n], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        s[n] = xe;
        fv[n] = fe;
      } else {
        s[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      s[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const auto xc = outside ? combine(centroid, xr, 0.5) : combine(centroid, s[n], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fv[n])) {
        s[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          s[i] = combine(s[0], s[i], 0.5);
          fv[i] = f(s[i]);
        }
      }
    }
    sort_simplex();
  }
  res.x = s[0];
  res.value = fv[0];
  res.iterations = it;
  return res;
}

}  // namespace driqa

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "driqa/errors.hpp"
#include "driqa/nelder_mead.hpp"

namespace driqa {

/// F(N) = b1 * (1/2 - 1 / (1 + exp(b2 (N - b3)))) + b4 N + b5
struct LogisticParams {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 1.0, b5 = 0.0;

  double operator()(double n) const {
    return b1 * (0.5 - 1.0 / (1.0 + std::exp(b2 * (n - b3)))) + b4 * n + b5;
  }

  std::vector<double> as_vector() const { return {b1, b2, b3, b4, b5}; }
  static LogisticParams from_vector(const std::vector<double>& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }
  friend bool operator==(const LogisticParams&, const LogisticParams&) = default;
};

struct LogisticFit {
  LogisticParams params;
  double rmse = 0.0;
  double best_initial_rmse = 0.0;  // best RMSE among the multi-start initializations
};

namespace logistic_detail {

inline double sse(const LogisticParams& p, std::span<const double> n, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double e = p(n[i]) - f[i];
    s += e * e;
  }
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Unchecked fit used by fit_logistic and by plcc (which admits shorter lists).
// Both axes are standardized before the search, so the result is equivariant
// under increasing affine changes of either score scale.
inline LogisticFit fit(std::span<const double> n, std::span<const double> f) {
  const double cnt = static_cast<double>(n.size());
  double mn = 0.0, mf = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    mn += n[i];
    mf += f[i];
  }
  mn /= cnt;
  mf /= cnt;
  double sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sxx += (n[i] - mn) * (n[i] - mn);
    syy += (f[i] - mf) * (f[i] - mf);
  }
  const double sn = std::sqrt(sxx / cnt);
  const double sf = syy > 0.0 ? std::sqrt(syy / cnt) : 1.0;
  std::vector<double> z(n.size()), g(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    z[i] = (n[i] - mn) / sn;
    g[i] = (f[i] - mf) / sf;
  }
  double szg = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) szg += z[i] * g[i];
  const double slope = szg / cnt;
  const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
  const double range = *gmax - *gmin;
  const double med = median(z);

  std::vector<LogisticParams> starts = {
      {range, 1.0, med, slope, 0.0},
      {slope >= 0 ? range : -range, 4.0, med, 0.0, 0.0},
      {0.0, 1.0, med, slope, 0.0},
  };
  std::vector<double> sorted_z = z;
  std::sort(sorted_z.begin(), sorted_z.end());
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double c = sorted_z[static_cast<std::size_t>(q * static_cast<double>(sorted_z.size() - 1))];
    for (double a : {range, -range})
      for (double k : {2.0, 6.0}) starts.push_back({a, k, c, slope, 0.0});
  }

  auto objective = [&](const std::vector<double>& v) { return sse(LogisticParams::from_vector(v), z, g); };
  LogisticParams best_std;
  double best_sse = std::numeric_limits<double>::infinity();
  double best_init = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    best_init = std::min(best_init, sse(s, z, g));
    std::vector<double> x = s.as_vector();
    double val = objective(x);
    // Restart from the converged vertex until the simplex stops improving.
    for (int restart = 0; restart < 6; ++restart) {
      const auto r = nelder_mead(objective, x);
      const bool improved = r.value < val * (1.0 - 1e-12) || (val > 0 && r.value == 0.0);
      if (r.value <= val) {
        x = r.x;
        val = r.value;
      }
      if (!improved) break;
    }
    if (val < best_sse) {
      best_sse = val;
      best_std = LogisticParams::from_vector(x);
    }
  }
  // Undo the standardization: F(N) = mf + sf * G((N - mn) / sn).
  const auto& b = best_std;
  LogisticFit best;
  best.params = {sf * b.b1, b.b2 / sn, mn + sn * b.b3, sf * b.b4 / sn, mf + sf * (b.b5 - b.b4 * mn / sn)};
  best.rmse = sf * std::sqrt(best_sse / cnt);
  best.best_initial_rmse = sf * std::sqrt(best_init / cnt);
  return best;
}

}  // namespace logistic_detail

/// Least-squares fit of the five-parameter logistic mapping NR scores onto an
/// FR scale. Needs at least 10 pairs and a non-constant NR list.
inline LogisticFit fit_logistic(std::span<const double> n_scores, std::span<const double> f_scores) {
  if (n_scores.size() != f_scores.size())
    throw DomainError("fit_logistic: score lists differ in length");
  if (n_scores.size() < 10) throw DegenerateInput("fit_logistic: need at least 10 paired samples");
  const auto [lo, hi] = std::minmax_element(n_scores.begin(), n_scores.end());
  if (*lo == *hi) throw DegenerateInput("fit_logistic: NR scores are all equal");
  return logistic_detail::fit(n_scores, f_scores);
}

}  // namespace driqa

#pragma once

// nu-support vector regression with an RBF kernel (SMO solver) and a
// two-tier grid search.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "driqa/errors.hpp"
#include "driqa/parallel.hpp"
#include "driqa/stats.hpp"

namespace driqa {

using Feature2 = std::array<double, 2>;  // (AS_DR, RS_FD)

struct SvrHyper {
  double c = 1.0;
  double nu = 0.5;
  double gamma = 1.0;
  double tolerance = 1e-3;
  friend bool operator==(const SvrHyper&, const SvrHyper&) = default;
};

struct SvrModel {
  SvrHyper hyper;
  Feature2 lo{0.0, 0.0};     // min-max scaling of the training features
  Feature2 scale{1.0, 1.0};  // 1 / (max - min), or 0 for a constant feature
  std::vector<Feature2> support;  // scaled support vectors
  std::vector<double> coef;
  double bias = 0.0;

  Feature2 scaled(const Feature2& x) const {
    return {(x[0] - lo[0]) * scale[0], (x[1] - lo[1]) * scale[1]};
  }

  double predict(const Feature2& x) const {
    const auto z = scaled(x);
    double s = bias;
    for (std::size_t i = 0; i < support.size(); ++i) {
      const double d0 = z[0] - support[i][0], d1 = z[1] - support[i][1];
      s += coef[i] * std::exp(-hyper.gamma * (d0 * d0 + d1 * d1));
    }
    return s;
  }
};

struct SvrSample {
  Feature2 x{0.0, 0.0};
  double y = 0.0;
  double weight = 1.0;  // multiplicity of the sample
};

namespace svr_detail {

inline constexpr double kTau = 1e-12;

/// Solves the nu-SVR dual
///   min 1/2 a^T Q a + p^T a,  0 <= a_i <= u_i,
///   sum of a over each half = C nu / 2,
/// over 2n variables (a+ then a-), following the working-set selection of the
/// reference libsvm solver without shrinking.
inline void solve(const std::vector<Feature2>& z, std::span<const double> y,
                  std::span<const double> upper, const SvrHyper& h,
                  std::vector<double>& coef, double& bias) {
  const int n = static_cast<int>(z.size());
  const int l = 2 * n;
  std::vector<double> K(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double d0 = z[i][0] - z[j][0], d1 = z[i][1] - z[j][1];
      K[i * n + j] = K[j * n + i] = std::exp(-h.gamma * (d0 * d0 + d1 * d1));
    }
  auto sign = [n](int t) { return t < n ? 1.0 : -1.0; };
  auto q = [&](int a, int b) { return sign(a) * sign(b) * K[(a % n) * n + (b % n)]; };
  auto ub = [&](int t) { return upper[t % n]; };

  std::vector<double> alpha(l, 0.0);
  double sum = h.c * h.nu / 2.0;
  for (int i = 0; i < n; ++i) {
    alpha[i] = alpha[i + n] = std::min(sum, upper[i]);
    sum -= alpha[i];
  }
  std::vector<double> p(l), G(l);
  for (int i = 0; i < n; ++i) {
    p[i] = -y[i];
    p[i + n] = y[i];
  }
  for (int t = 0; t < l; ++t) {
    double g = p[t];
    for (int s = 0; s < l; ++s)
      if (alpha[s] != 0.0) g += q(t, s) * alpha[s];
    G[t] = g;
  }
  auto at_upper = [&](int t) { return alpha[t] >= ub(t); };
  auto at_lower = [&](int t) { return alpha[t] <= 0.0; };

  const long max_iter = std::max<long>(10'000'000L, 100L * l);
  long iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter) throw ConvergenceError("nu-SVR solver hit the iteration cap");
    double gmaxp = -std::numeric_limits<double>::infinity(), gmaxp2 = gmaxp;
    double gmaxn = gmaxp, gmaxn2 = gmaxp;
    int ip = -1, in = -1;
    for (int t = 0; t < l; ++t) {
      if (sign(t) > 0) {
        if (!at_upper(t) && -G[t] >= gmaxp) {
          gmaxp = -G[t];
          ip = t;
        }
      } else if (!at_lower(t) && G[t] >= gmaxn) {
        gmaxn = G[t];
        in = t;
      }
    }
    int jmin = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < l; ++j) {
      if (sign(j) > 0) {
        if (at_lower(j)) continue;
        gmaxp2 = std::max(gmaxp2, G[j]);
        const double diff = gmaxp + G[j];
        if (ip >= 0 && diff > 0) {
          double quad = q(ip, ip) + q(j, j) - 2.0 * q(ip, j);
          const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
          if (obj <= best) {
            best = obj;
            jmin = j;
          }
        }
      } else {
        if (at_upper(j)) continue;
        gmaxn2 = std::max(gmaxn2, -G[j]);
        const double diff = gmaxn - G[j];
        if (in >= 0 && diff > 0) {
          double quad = q(in, in) + q(j, j) - 2.0 * q(in, j);
          const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
          if (obj <= best) {
            best = obj;
            jmin = j;
          }
        }
      }
    }
    if (std::max(gmaxp + gmaxp2, gmaxn + gmaxn2) < h.tolerance || jmin == -1) break;
    const int i = sign(jmin) > 0 ? ip : in;
    const int j = jmin;

    const double ci = ub(i), cj = ub(j);
    const double oi = alpha[i], oj = alpha[j];
    double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
    if (quad <= 0) quad = kTau;
    const double delta = (G[i] - G[j]) / quad;
    const double s = alpha[i] + alpha[j];
    alpha[i] -= delta;
    alpha[j] += delta;
    if (s > ci) {
      if (alpha[i] > ci) {
        alpha[i] = ci;
        alpha[j] = s - ci;
      }
    } else if (alpha[j] < 0) {
      alpha[j] = 0;
      alpha[i] = s;
    }
    if (s > cj) {
      if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = s - cj;
      }
    } else if (alpha[i] < 0) {
      alpha[i] = 0;
      alpha[j] = s;
    }
    const double di = alpha[i] - oi, dj = alpha[j] - oj;
    for (int t = 0; t < l; ++t) G[t] += q(t, i) * di + q(t, j) * dj;
  }

  // Offset from the free variables of each half (bounds when none are free).
  double r[2];
  for (int half = 0; half < 2; ++half) {
    double lb = -std::numeric_limits<double>::infinity(), ubv = -lb, acc = 0.0;
    int free = 0;
    for (int t = half * n; t < (half + 1) * n; ++t) {
      if (at_upper(t))
        lb = std::max(lb, G[t]);
      else if (at_lower(t))
        ubv = std::min(ubv, G[t]);
      else {
        ++free;
        acc += G[t];
      }
    }
    r[half] = free > 0 ? acc / free : 0.5 * (ubv + lb);
  }
  const double rho = 0.5 * (r[0] - r[1]);
  bias = -rho;
  coef.assign(n, 0.0);
  for (int i = 0; i < n; ++i) coef[i] = alpha[i] - alpha[i + n];
}

}  // namespace svr_detail

/// Trains a nu-SVR. Each sample's box bound is C * weight / total weight.
inline SvrModel train_svr(std::span<const SvrSample> samples, const SvrHyper& h) {
  if (samples.empty()) throw DegenerateInput("train_svr: empty training set");
  if (!(h.c > 0) || !(h.nu > 0 && h.nu <= 1) || !(h.gamma > 0) || !(h.tolerance > 0))
    throw DomainError("train_svr: invalid hyper-parameters");
  SvrModel m;
  m.hyper = h;
  for (int k = 0; k < 2; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : samples) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y)) throw DomainError("train_svr: non-finite sample");
      lo = std::min(lo, s.x[k]);
      hi = std::max(hi, s.x[k]);
    }
    m.lo[k] = lo;
    m.scale[k] = hi > lo ? 1.0 / (hi - lo) : 0.0;
  }
  double wsum = 0.0;
  for (const auto& s : samples) {
    if (!(s.weight > 0)) throw DomainError("train_svr: sample weights must be positive");
    wsum += s.weight;
  }
  std::vector<Feature2> z;
  std::vector<double> y, upper;
  for (const auto& s : samples) {
    z.push_back(m.scaled(s.x));
    y.push_back(s.y);
    upper.push_back(h.c * s.weight / wsum);
  }
  std::vector<double> coef;
  svr_detail::solve(z, y, upper, h, coef, m.bias);
  for (std::size_t i = 0; i < coef.size(); ++i)
    if (coef[i] != 0.0) {
      m.support.push_back(z[i]);
      m.coef.push_back(coef[i]);
    }
  return m;
}

struct SvrGrid {
  std::vector<double> c, nu, gamma, tolerance;

  static SvrGrid coarse() {
    SvrGrid g;
    for (int e = -2; e <= 10; e += 2) g.c.push_back(std::ldexp(1.0, e));
    g.nu = {0.2, 0.4, 0.5, 0.6, 0.8};
    for (int e = -6; e <= 4; e += 2) g.gamma.push_back(std::ldexp(1.0, e));
    g.tolerance = {1e-3};
    return g;
  }

  static SvrGrid refine(const SvrHyper& at) {
    SvrGrid g;
    g.c = {at.c / 2, at.c, at.c * 2};
    g.gamma = {at.gamma / 2, at.gamma, at.gamma * 2};
    for (double nu : {at.nu - 0.1, at.nu, at.nu + 0.1})
      if (nu > 1e-9 && nu <= 1.0) g.nu.push_back(nu);
    g.tolerance = {at.tolerance};
    return g;
  }

  std::vector<SvrHyper> points() const {
    std::vector<SvrHyper> out;
    for (double cc : c)
      for (double n : nu)
        for (double gm : gamma)
          for (double t : tolerance) out.push_back({cc, n, gm, t});
    return out;
  }
};

struct SvrSearchResult {
  SvrModel model;
  double val_plcc = 0.0;
  double val_srcc = 0.0;
};

/// Validation score of one hyper-parameter point; -inf when undefined.
inline std::pair<double, double> svr_validation_score(std::span<const SvrSample> train,
                                                      std::span<const SvrSample> val, const SvrHyper& h) {
  const double bad = -std::numeric_limits<double>::infinity();
  try {
    const auto m = train_svr(train, h);
    std::vector<double> pred, tgt;
    for (const auto& s : val) {
      pred.push_back(m.predict(s.x));
      tgt.push_back(s.y);
    }
    return {plcc(pred, tgt), srcc(pred, tgt)};
  } catch (const Error&) {
    return {bad, bad};
  }
}

/// Coarse grid, then the x2 neighbourhood of the coarse winner. Points are
/// ranked by validation PLCC with SRCC breaking ties; the winner is retrained
/// on the training split.
inline SvrSearchResult svr_grid_search(std::span<const SvrSample> train, std::span<const SvrSample> val,
                                       const SvrGrid& coarse = SvrGrid::coarse()) {
  if (val.size() < 4) throw DegenerateInput("svr_grid_search: validation split too small");
  struct Scored {
    SvrHyper h;
    double plcc, srcc;
  };
  auto run = [&](const std::vector<SvrHyper>& pts) {
    std::vector<Scored> sc(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      const auto [p, s] = svr_validation_score(train, val, pts[i]);
      sc[i] = {pts[i], p, s};
    });
    Scored best{{}, -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : sc)
      if (s.plcc > best.plcc || (s.plcc == best.plcc && s.srcc > best.srcc)) best = s;
    return best;
  };
  const auto first = run(coarse.points());
  if (!std::isfinite(first.plcc)) throw DegenerateInput("svr_grid_search: no grid point produced a usable model");
  auto best = run(SvrGrid::refine(first.h).points());
  if (best.plcc < first.plcc || (best.plcc == first.plcc && best.srcc < first.srcc)) best = first;
  SvrSearchResult r;
  r.model = train_svr(train, best.h);
  r.val_plcc = best.plcc;
  r.val_srcc = best.srcc;
  return r;
}

}  // namespace driqa

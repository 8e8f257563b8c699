#pragma once

// Fusion models mapping (AS_DR, RS_FD) to a predicted AS_FD.

#include <Eigen/Dense>

#include <cctype>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driqa/distortions.hpp"
#include "driqa/errors.hpp"
#include "driqa/fr_metrics.hpp"
#include "driqa/niqe.hpp"

namespace driqa {

/// Where the DR-side score comes from and which FR measure provides RS_FD.
/// With `nr` set, AS_DR is an NR estimate mapped onto the `fr` scale.
struct BackendPair {
  std::optional<NrBackend> nr;
  FrBackend fr = FrBackend::Ssim;

  std::string str() const {
    auto up = [](std::string_view s) {
      std::string o(s);
      for (auto& c : o) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return o;
    };
    return (nr ? up(to_string(*nr)) : up(to_string(fr))) + "-" + up(to_string(fr));
  }

  static std::optional<BackendPair> parse(std::string_view s) {
    const auto dash = s.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    std::string a(s.substr(0, dash)), b(s.substr(dash + 1));
    for (auto* p : {&a, &b})
      for (auto& c : *p) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto rs = parse_fr_backend(b);
    if (!rs) return std::nullopt;
    if (const auto nr = parse_nr_backend(a)) return BackendPair{*nr, *rs};
    if (const auto fr = parse_fr_backend(a); fr && *fr == *rs) return BackendPair{std::nullopt, *rs};
    return std::nullopt;
  }

  friend bool operator==(const BackendPair&, const BackendPair&) = default;
};

inline void check_finite(double a, double b, const char* who) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw DomainError(std::string(who) + ": non-finite input");
}

/// Two-tier point-slope model: AS_FD = m (RS_FD - 1) + AS_DR with m = P1 AS_DR + P2.
struct Model1Params {
  double p1 = 0.0;
  double p2 = 0.0;
  ComboType combo = ComboType::AllData;
  BackendPair pair;
};

inline double model1_predict(const Model1Params& p, double as_dr, double rs_fd) {
  check_finite(as_dr, rs_fd, "model1_predict");
  return p.p1 * as_dr * rs_fd + p.p2 * rs_fd + (1.0 - p.p1) * as_dr - p.p2;
}

/// Quadratic polynomial model in (AS_DR, RS_FD).
struct Model2Params {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0, f = 0.0;
  ComboType combo = ComboType::AllData;
  BackendPair pair;

  /// The coefficients under which this model equals Model 1.
  static Model2Params from_model1(const Model1Params& m) {
    return {0.0, 0.0, 1.0 - m.p1, m.p2, m.p1, -m.p2, m.combo, m.pair};
  }
};

inline double model2_predict(const Model2Params& p, double as_dr, double rs_fd) {
  check_finite(as_dr, rs_fd, "model2_predict");
  return p.a * as_dr * as_dr + p.b * rs_fd * rs_fd + p.c * as_dr + p.d * rs_fd +
         p.e * as_dr * rs_fd + p.f;
}

/// One FD observation used for fitting.
struct FusionSample {
  double as_dr = 0.0;  // FR AS_DR, or the mapped NR estimate in Scenario 2
  double rs_fd = 0.0;
  double as_fd = 0.0;  // fitting target
};

/// All FD observations that share one DR image (one curve of the behaviour plot).
struct CurveGroup {
  double as_dr = 0.0;
  std::vector<double> rs_fd;
  std::vector<double> as_fd;
};

/// Least-squares slope of a curve anchored at (1, AS_DR).
inline double anchored_slope(const CurveGroup& g) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.rs_fd.size(); ++i) {
    const double dx = g.rs_fd[i] - 1.0;
    num += dx * (g.as_fd[i] - g.as_dr);
    den += dx * dx;
  }
  if (den == 0.0) throw DegenerateInput("anchored slope: every RS_FD in the curve equals 1");
  return num / den;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
inline LinearFit ols_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInput("ols_line: all x values are identical");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

struct Model1Fit {
  Model1Params params;
  std::vector<double> slopes;  // tier-1 slope per group
  double tier2_r2 = 0.0;
};

/// Tier 1: anchored slope per curve. Tier 2: unweighted OLS of slope on AS_DR.
inline Model1Fit fit_model1(const std::vector<CurveGroup>& groups) {
  if (groups.size() < 2) throw DegenerateInput("fit_model1: need at least 2 stage-1 groups");
  Model1Fit fit;
  std::vector<double> xs;
  for (const auto& g : groups) {
    if (g.rs_fd.size() != g.as_fd.size()) throw DomainError("fit_model1: ragged group");
    if (g.rs_fd.size() < 3) throw DegenerateInput("fit_model1: each group needs at least 3 samples");
    fit.slopes.push_back(anchored_slope(g));
    xs.push_back(g.as_dr);
  }
  const auto line = ols_line(xs, fit.slopes);
  fit.params.p1 = line.slope;
  fit.params.p2 = line.intercept;
  fit.tier2_r2 = line.r2;
  return fit;
}

/// OLS on the six-term quadratic design. Rank-deficient designs are rejected.
inline Model2Params fit_model2(const std::vector<FusionSample>& samples) {
  if (samples.size() < 6) throw DegenerateInput("fit_model2: need at least 6 samples");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd X(n, 6);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    X(i, 0) = s.as_dr * s.as_dr;
    X(i, 1) = s.rs_fd * s.rs_fd;
    X(i, 2) = s.as_dr;
    X(i, 3) = s.rs_fd;
    X(i, 4) = s.as_dr * s.rs_fd;
    X(i, 5) = 1.0;
    y(i) = s.as_fd;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 6) throw DegenerateInput("fit_model2: rank-deficient design matrix");
  const Eigen::VectorXd beta = qr.solve(y);
  Model2Params p;
  p.a = beta(0);
  p.b = beta(1);
  p.c = beta(2);
  p.d = beta(3);
  p.e = beta(4);
  p.f = beta(5);
  return p;
}

}  // namespace driqa

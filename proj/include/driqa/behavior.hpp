#pragma once

// AS_FD vs RS_FD curve families: per-curve anchored slopes, overshoot
// detection, CSV tables and SVG line plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "driqa/models.hpp"
#include "driqa/scores.hpp"

namespace driqa {

struct CurvePoint {
  int level2 = 0;
  double rs_fd = 0.0;
  double as_fd = 0.0;
};

/// One DR image and the FD images derived from it, ordered by stage-2 level.
struct BehaviorCurve {
  ComboType combo = ComboType::BlurJpeg;
  std::string pristine_id;
  int level1 = 0;
  double as_dr = 0.0;
  std::vector<CurvePoint> points;
  double m = kNaN;     // anchored slope through (1, AS_DR); NaN if every RS_FD is 1
  double rmse = kNaN;  // residual of the anchored line
};

inline std::vector<BehaviorCurve> extract_behavior(const std::vector<ScoreRow>& rows, ComboType combo,
                                                   FrBackend backend) {
  std::map<std::tuple<std::string, int>, BehaviorCurve> by_key;
  for (const auto& r : rows) {
    if (r.combo != combo) continue;
    auto& c = by_key[{r.pristine_id, r.level1}];
    c.combo = combo;
    c.pristine_id = r.pristine_id;
    c.level1 = r.level1;
    c.as_dr = r.as_dr_of(backend);
    c.points.push_back({r.level2, r.rs_fd_of(backend), r.as_fd_of(backend)});
  }
  if (by_key.empty()) throw DomainError("extract_behavior: no rows for " + std::string(to_string(combo)));
  std::vector<BehaviorCurve> out;
  for (auto& [key, c] : by_key) {
    std::sort(c.points.begin(), c.points.end(), [](const auto& a, const auto& b) { return a.level2 < b.level2; });
    for (const auto& p : c.points)
      if (!std::isfinite(p.rs_fd) || !std::isfinite(p.as_fd) || !std::isfinite(c.as_dr))
        throw DomainError("extract_behavior: scores missing for backend " + std::string(to_string(backend)));
    CurveGroup g{c.as_dr, {}, {}};
    for (const auto& p : c.points) {
      g.rs_fd.push_back(p.rs_fd);
      g.as_fd.push_back(p.as_fd);
    }
    try {
      c.m = anchored_slope(g);
      double s = 0.0;
      for (const auto& p : c.points) {
        const double e = c.as_dr + c.m * (p.rs_fd - 1.0) - p.as_fd;
        s += e * e;
      }
      c.rmse = std::sqrt(s / static_cast<double>(c.points.size()));
    } catch (const DegenerateInput&) {
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// OLS of the per-curve slope on AS_DR, pooled over every curve with a slope.
inline LinearFit slope_linearity(const std::vector<BehaviorCurve>& curves) {
  std::vector<double> x, y;
  for (const auto& c : curves)
    if (std::isfinite(c.m)) {
      x.push_back(c.as_dr);
      y.push_back(c.m);
    }
  if (x.size() < 2) throw DegenerateInput("slope_linearity: fewer than two fitted curves");
  return ols_line(x, y);
}

inline constexpr double kOvershootThreshold = 0.002;

struct OvershootCurve {
  ComboType combo = ComboType::BlurJpeg;
  std::string pristine_id;
  int level1 = 0;
  double as_dr = 0.0;
  std::vector<int> levels2;  // stage-2 levels with AS_FD > AS_DR + threshold
};

struct OvershootReport {
  std::vector<OvershootCurve> curves;  // only curves with at least one overshoot
  std::map<ComboType, std::size_t> points;  // overshoot points per combo (0 when none)

  std::size_t points_for(ComboType c) const {
    const auto it = points.find(c);
    return it == points.end() ? 0 : it->second;
  }
};

inline OvershootReport detect_overshoot(const std::vector<BehaviorCurve>& curves,
                                        double threshold = kOvershootThreshold) {
  OvershootReport rep;
  for (const auto& c : curves) {
    rep.points.try_emplace(c.combo, 0);
    OvershootCurve oc{c.combo, c.pristine_id, c.level1, c.as_dr, {}};
    for (const auto& p : c.points)
      if (p.as_fd > c.as_dr + threshold) oc.levels2.push_back(p.level2);
    if (!oc.levels2.empty()) {
      rep.points[c.combo] += oc.levels2.size();
      rep.curves.push_back(std::move(oc));
    }
  }
  return rep;
}

namespace behavior_detail {
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace behavior_detail

inline void write_curve_csv(std::ostream& os, const std::vector<BehaviorCurve>& curves, bool header = true) {
  using behavior_detail::num;
  if (header) os << "combo,pristine_id,level1,level2,as_dr,rs_fd,as_fd\n";
  for (const auto& c : curves)
    for (const auto& p : c.points)
      os << short_name(c.combo) << ',' << c.pristine_id << ',' << c.level1 << ',' << p.level2 << ','
         << num(c.as_dr) << ',' << num(p.rs_fd) << ',' << num(p.as_fd) << '\n';
}

inline void write_curve_fit_csv(std::ostream& os, const std::vector<BehaviorCurve>& curves, bool header = true) {
  using behavior_detail::num;
  if (header) os << "combo,pristine_id,level1,as_dr,m,rmse\n";
  for (const auto& c : curves)
    os << short_name(c.combo) << ',' << c.pristine_id << ',' << c.level1 << ',' << num(c.as_dr) << ','
       << num(c.m) << ',' << num(c.rmse) << '\n';
}

inline void write_overshoot_csv(std::ostream& os, const OvershootReport& rep, bool header = true) {
  using behavior_detail::num;
  if (header) os << "combo,pristine_id,level1,as_dr,levels2\n";
  for (const auto& c : rep.curves) {
    os << short_name(c.combo) << ',' << c.pristine_id << ',' << c.level1 << ',' << num(c.as_dr) << ',';
    for (std::size_t i = 0; i < c.levels2.size(); ++i) os << (i ? ";" : "") << c.levels2[i];
    os << '\n';
  }
}

/// Curve family for one pristine image: one polyline per stage-1 level and a
/// dotted AS_DR baseline for each.
inline void write_behavior_svg(std::ostream& os, const std::vector<BehaviorCurve>& curves,
                               const std::string& title) {
  constexpr double W = 520, H = 420, L = 60, R = 130, T = 36, B = 50;
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000"};
  double lo = 1.0;
  for (const auto& c : curves) {
    lo = std::min(lo, c.as_dr);
    for (const auto& p : c.points) lo = std::min({lo, p.rs_fd, p.as_fd});
  }
  lo = std::floor(std::max(lo, -1.0) * 10.0) / 10.0;
  if (lo >= 1.0) lo = 0.9;
  const double hi = 1.0 + 0.02;
  auto px = [&](double v) { return L + (v - lo) / (hi - lo) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - lo) / (hi - lo) * (H - T - B); };
  char buf[160];

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  os << buf;
  for (double t = lo; t <= 1.0 + 1e-9; t += 0.1) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.1f</text>\n",
                  px(t), H - B, px(t), H - B + 5, px(t), H - B + 18, t);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.1f</text>\n",
                  L - 5, py(t), L, py(t), L - 8, py(t) + 4, t);
    os << buf;
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">RS_FD</text>\n";
  os << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">AS_FD</text>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* col = kColors[i % std::size(kColors)];
    std::snprintf(buf, sizeof buf,
                  "<line class=\"baseline\" x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                  "stroke-dasharray=\"2 3\"/>\n",
                  L, py(c.as_dr), W - R, py(c.as_dr), col);
    os << buf;
    os << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", k ? " " : "", px(c.points[k].rs_fd), py(c.points[k].as_fd));
      os << buf;
    }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"1.5\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">S1-L%d</text>\n",
                  W - R + 12, T + 10 + 16.0 * i, W - R + 32, T + 10 + 16.0 * i, col, W - R + 38,
                  T + 14 + 16.0 * i, c.level1);
    os << buf;
  }
  os << "</svg>\n";
}

}  // namespace driqa

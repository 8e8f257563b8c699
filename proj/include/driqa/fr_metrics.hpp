#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driqa/errors.hpp"
#include "driqa/image.hpp"
#include "driqa/image_io.hpp"

namespace driqa {

enum class FrBackend { Ssim, MsSsim };

inline std::string_view to_string(FrBackend b) { return b == FrBackend::Ssim ? "ssim" : "msssim"; }

inline std::optional<FrBackend> parse_fr_backend(std::string_view s) {
  if (s == "ssim" || s == "SSIM") return FrBackend::Ssim;
  if (s == "msssim" || s == "MSSSIM" || s == "ms-ssim") return FrBackend::MsSsim;
  return std::nullopt;
}

/// Per-pixel similarity over the valid-window region of an image pair.
struct QualityMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
  }
};

struct SsimResult {
  double score = 0.0;
  QualityMap map;
};

namespace ssim_detail {

inline constexpr int kWindowRadius = 5;  // 11x11
inline constexpr double kWindowSigma = 1.5;
inline constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

inline const std::vector<double>& window() {
  static const std::vector<double> w = gaussian_kernel(kWindowSigma, kWindowRadius);
  return w;
}

// Separable Gaussian filtering restricted to fully-covered windows.
inline std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
  const auto& k = window();
  const int r = kWindowRadius, ow = w - 2 * r, oh = h - 2 * r;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = 0; t <= 2 * r; ++t) acc += k[t] * row[x + t];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = 0; t <= 2 * r; ++t) acc += k[t] * tmp[static_cast<std::size_t>(y + t) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

struct LocalStats {
  int width = 0, height = 0;
  std::vector<double> luminance;       // (2 mx my + C1) / (mx^2 + my^2 + C1)
  std::vector<double> contrast_struct; // (2 sxy + C2) / (sx^2 + sy^2 + C2)
};

inline LocalStats local_stats(const ImagePlane& a, const ImagePlane& b) {
  const int w = a.width(), h = a.height();
  const std::size_t n = a.size();
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = av[i] * av[i];
    bb[i] = bv[i] * bv[i];
    ab[i] = av[i] * bv[i];
  }
  const auto mu_a = filter_valid(av, w, h), mu_b = filter_valid(bv, w, h);
  const auto e_aa = filter_valid(aa, w, h), e_bb = filter_valid(bb, w, h),
             e_ab = filter_valid(ab, w, h);
  LocalStats s;
  s.width = w - 2 * kWindowRadius;
  s.height = h - 2 * kWindowRadius;
  s.luminance.resize(mu_a.size());
  s.contrast_struct.resize(mu_a.size());
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma, vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    s.luminance[i] = (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
    s.contrast_struct[i] = (2.0 * cov + kC2) / (va + vb + kC2);
  }
  return s;
}

inline void check_pair(const ImagePlane& a, const ImagePlane& b, int min_dim, const char* who) {
  if (!a.same_dims(b)) throw DomainError(std::string(who) + ": image dimensions differ");
  if (a.width() < min_dim || a.height() < min_dim)
    throw DomainError(std::string(who) + ": images must be at least " + std::to_string(min_dim) +
                      "x" + std::to_string(min_dim));
}

}  // namespace ssim_detail

/// SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, L=255.
/// The map covers only fully-covered windows; the score is its mean.
inline SsimResult ssim(const ImagePlane& ref, const ImagePlane& test) {
  ssim_detail::check_pair(ref, test, 16, "ssim");
  auto st = ssim_detail::local_stats(ref, test);
  SsimResult r;
  r.map.width = st.width;
  r.map.height = st.height;
  r.map.values.resize(st.luminance.size());
  for (std::size_t i = 0; i < r.map.values.size(); ++i)
    r.map.values[i] = st.luminance[i] * st.contrast_struct[i];
  r.score = r.map.mean();
  return r;
}

inline double ssim_score(const ImagePlane& ref, const ImagePlane& test) {
  return ssim(ref, test).score;
}

inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

/// Five-scale MS-SSIM. Contrast-structure means (and the final luminance mean)
/// below zero are clamped to 0 before exponentiation, so the result is in [0, 1].
inline double msssim(const ImagePlane& ref, const ImagePlane& test) {
  ssim_detail::check_pair(ref, test, 176, "msssim");
  ImagePlane a = ref, b = test;
  double result = 1.0;
  for (int scale = 0; scale < 5; ++scale) {
    const auto st = ssim_detail::local_stats(a, b);
    double cs = 0.0;
    for (double v : st.contrast_struct) cs += v;
    cs /= static_cast<double>(st.contrast_struct.size());
    result *= std::pow(std::max(cs, 0.0), kMsSsimWeights[scale]);
    if (scale == 4) {
      double l = 0.0;
      for (double v : st.luminance) l += v;
      l /= static_cast<double>(st.luminance.size());
      result *= std::pow(std::max(l, 0.0), kMsSsimWeights[scale]);
    } else {
      a = downsample2(a);
      b = downsample2(b);
    }
  }
  return result;
}

inline double fr_score(FrBackend backend, const ImagePlane& ref, const ImagePlane& test) {
  return backend == FrBackend::Ssim ? ssim_score(ref, test) : msssim(ref, test);
}

/// Absolute and relative scores of one DR/FD pair against its pristine source.
struct ScoreTriple {
  double as_dr = 0.0;  // FR(pr, dr)
  double rs_fd = 0.0;  // FR(dr, fd)
  double as_fd = 0.0;  // FR(pr, fd)
  FrBackend backend = FrBackend::Ssim;
};

inline ScoreTriple score_triple(const ImagePlane& pr, const ImagePlane& dr, const ImagePlane& fd,
                                FrBackend backend) {
  if (!pr.same_dims(dr) || !pr.same_dims(fd))
    throw DomainError("score_triple: images must share dimensions");
  return {fr_score(backend, pr, dr), fr_score(backend, dr, fd), fr_score(backend, pr, fd), backend};
}

/// Writes a quality map as 8-bit PGM with [-1, 1] mapped affinely onto [0, 255].
inline void save_quality_map(const std::filesystem::path& path, const QualityMap& map) {
  std::vector<double> px(map.values.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = (map.values[i] + 1.0) * 127.5;
  save_plane(path, ImagePlane(map.width, map.height, std::move(px)));
}

}  // namespace driqa

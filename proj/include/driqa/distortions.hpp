#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "driqa/errors.hpp"
#include "driqa/image.hpp"
#include "driqa/rng.hpp"
#include "driqa/transforms.hpp"

namespace driqa {

enum class DistortionType { GaussianBlur, GaussianNoise, JpegSim, Jp2kSim };

enum class ComboType { BlurJpeg, BlurNoise, JpegJpeg, NoiseJpeg, NoiseJp2k, NbjJpeg, AllData };

inline constexpr std::array<ComboType, 5> kGeneratingCombos = {
    ComboType::BlurJpeg, ComboType::BlurNoise, ComboType::JpegJpeg, ComboType::NoiseJpeg,
    ComboType::NoiseJp2k};

inline constexpr std::array<ComboType, 7> kAllGroupings = {
    ComboType::BlurJpeg,  ComboType::BlurNoise, ComboType::JpegJpeg, ComboType::NoiseJpeg,
    ComboType::NoiseJp2k, ComboType::NbjJpeg,   ComboType::AllData};

inline constexpr std::array<DistortionType, 3> kStage1Types = {
    DistortionType::GaussianBlur, DistortionType::JpegSim, DistortionType::GaussianNoise};

inline constexpr int kStage1Levels = 11;
inline constexpr int kStage2Levels = 17;

inline std::string_view to_string(DistortionType t) {
  switch (t) {
    case DistortionType::GaussianBlur: return "Blur";
    case DistortionType::GaussianNoise: return "Noise";
    case DistortionType::JpegSim: return "JPEG";
    case DistortionType::Jp2kSim: return "JP2K";
  }
  return "?";
}

inline std::string_view to_string(ComboType c) {
  switch (c) {
    case ComboType::BlurJpeg: return "Blur-JPEG";
    case ComboType::BlurNoise: return "Blur-Noise";
    case ComboType::JpegJpeg: return "JPEG-JPEG";
    case ComboType::NoiseJpeg: return "Noise-JPEG";
    case ComboType::NoiseJp2k: return "Noise-JP2K";
    case ComboType::NbjJpeg: return "NBJ-JPEG";
    case ComboType::AllData: return "AllData";
  }
  return "?";
}

/// Short column labels used in result tables.
inline std::string_view short_name(ComboType c) {
  switch (c) {
    case ComboType::BlurJpeg: return "B-JPG";
    case ComboType::BlurNoise: return "B-N";
    case ComboType::JpegJpeg: return "JPG-JPG";
    case ComboType::NoiseJpeg: return "N-JPG";
    case ComboType::NoiseJp2k: return "N-JP2";
    case ComboType::NbjJpeg: return "NBJ-JPG";
    case ComboType::AllData: return "AllData";
  }
  return "?";
}

inline std::optional<DistortionType> parse_distortion(std::string_view s) {
  for (auto t : {DistortionType::GaussianBlur, DistortionType::GaussianNoise,
                 DistortionType::JpegSim, DistortionType::Jp2kSim})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

/// Accepts the long name ("Blur-JPEG"), the short label ("B-JPG") or a lowercase
/// dashless form ("blurjpeg").
inline std::optional<ComboType> parse_combo(std::string_view s) {
  auto canon = [](std::string_view v) {
    std::string out;
    for (char ch : v)
      if (ch != '-' && ch != '_') out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
  };
  const std::string key = canon(s);
  for (auto c : kAllGroupings)
    if (key == canon(to_string(c)) || key == canon(short_name(c))) return c;
  if (key == "all" || key == "alldata") return ComboType::AllData;
  return std::nullopt;
}

inline bool is_generating(ComboType c) {
  return c != ComboType::NbjJpeg && c != ComboType::AllData;
}

/// (stage-1 type, stage-2 type) of a generating combination.
inline std::pair<DistortionType, DistortionType> combo_stages(ComboType c) {
  switch (c) {
    case ComboType::BlurJpeg: return {DistortionType::GaussianBlur, DistortionType::JpegSim};
    case ComboType::BlurNoise: return {DistortionType::GaussianBlur, DistortionType::GaussianNoise};
    case ComboType::JpegJpeg: return {DistortionType::JpegSim, DistortionType::JpegSim};
    case ComboType::NoiseJpeg: return {DistortionType::GaussianNoise, DistortionType::JpegSim};
    case ComboType::NoiseJp2k: return {DistortionType::GaussianNoise, DistortionType::Jp2kSim};
    default: throw DomainError("combo '" + std::string(to_string(c)) + "' is an aggregation label");
  }
}

/// Whether a generating combo belongs to an aggregation grouping.
inline bool combo_in_group(ComboType combo, ComboType group) {
  if (group == ComboType::AllData) return true;
  if (group == ComboType::NbjJpeg)
    return combo == ComboType::NoiseJpeg || combo == ComboType::BlurJpeg ||
           combo == ComboType::JpegJpeg;
  return combo == group;
}

/// A distortion operator instance. `stage` and `level` are 0 for ad-hoc specs.
struct DistortionSpec {
  DistortionType kind = DistortionType::GaussianBlur;
  int stage = 0;
  int level = 0;
  double param = 0.0;  // blur sigma (px), noise sigma (luminance units) or quantizer scale
};

// Calibration constants for the fixed distortion ladders. Every level is a
// geometric interpolation between the two endpoints.
struct LadderEndpoints {
  double first;
  double last;
};

inline std::optional<LadderEndpoints> ladder_endpoints(DistortionType kind, int stage) {
  if (stage == 1) {
    switch (kind) {
      case DistortionType::GaussianBlur: return LadderEndpoints{0.25, 4.0};
      case DistortionType::GaussianNoise: return LadderEndpoints{1.0, 32.0};
      case DistortionType::JpegSim: return LadderEndpoints{0.10, 2.5};
      default: return std::nullopt;
    }
  }
  if (stage == 2) {
    switch (kind) {
      case DistortionType::GaussianNoise: return LadderEndpoints{1.0, 48.0};
      case DistortionType::JpegSim: return LadderEndpoints{0.10, 4.0};
      case DistortionType::Jp2kSim: return LadderEndpoints{0.10, 4.0};
      default: return std::nullopt;
    }
  }
  return std::nullopt;
}

inline DistortionSpec resolve_ladder(DistortionType kind, int stage, int level) {
  if (stage != 1 && stage != 2) throw DomainError("resolve_ladder: stage must be 1 or 2");
  const int levels = stage == 1 ? kStage1Levels : kStage2Levels;
  if (level < 1 || level > levels)
    throw DomainError("resolve_ladder: level " + std::to_string(level) + " outside 1.." +
                      std::to_string(levels) + " for stage " + std::to_string(stage));
  const auto ends = ladder_endpoints(kind, stage);
  if (!ends)
    throw DomainError("resolve_ladder: " + std::string(to_string(kind)) +
                      " has no stage-" + std::to_string(stage) + " ladder");
  const double t = static_cast<double>(level - 1) / (levels - 1);
  const double param = ends->first * std::pow(ends->last / ends->first, t);
  return {kind, stage, level, param};
}

/// Machine-readable ladder table: one TSV row per (kind, stage, level).
inline void write_ladder_table(std::ostream& os) {
  os << "kind\tstage\tlevel\tparam\n";
  char buf[64];
  for (int stage : {1, 2})
    for (auto kind : {DistortionType::GaussianBlur, DistortionType::GaussianNoise,
                      DistortionType::JpegSim, DistortionType::Jp2kSim}) {
      if (!ladder_endpoints(kind, stage)) continue;
      const int levels = stage == 1 ? kStage1Levels : kStage2Levels;
      for (int l = 1; l <= levels; ++l) {
        std::snprintf(buf, sizeof buf, "%.17g", resolve_ladder(kind, stage, l).param);
        os << to_string(kind) << '\t' << stage << '\t' << l << '\t' << buf << '\n';
      }
    }
}

namespace distort_detail {

// Annex K luminance quantization table.
inline constexpr std::array<double, 64> kJpegLumaTable = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

// JP2K simulator: base quantizer step in pixel-domain units at scale 1.
inline constexpr double kJp2kBaseStep = 32.0;
inline constexpr int kJp2kLevels = 3;

inline ImagePlane jpeg_sim(const ImagePlane& img, double scale) {
  const int w = img.width(), h = img.height();
  const int bw = (w + 7) / 8, bh = (h + 7) / 8;
  ImagePlane out(w, h);
  transforms::Block8 block{};
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          block[y * 8 + x] = img(mirror_index(bx * 8 + x, w), mirror_index(by * 8 + y, h)) - 128.0;
      auto coef = transforms::dct8x8(block);
      for (int i = 0; i < 64; ++i) {
        const double step = kJpegLumaTable[i] * scale;
        coef[i] = std::round(coef[i] / step) * step;
      }
      const auto rec = transforms::idct8x8(coef);
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const int px = bx * 8 + x, py = by * 8 + y;
          if (px < w && py < h) out(px, py) = rec[y * 8 + x] + 128.0;
        }
    }
  return out;
}

// Pixel-domain L2 norm of each subband's synthesis basis, measured once on a
// reference grid by inverse-transforming a unit impulse at the subband centre.
inline const std::vector<double>& jp2k_subband_gains() {
  static const std::vector<double> gains = [] {
    constexpr int n = 256;
    const int bands = 1 + 3 * kJp2kLevels;
    std::vector<double> g(bands, 0.0);
    std::vector<int> found(bands, 0);
    // Sizes of each level's region.
    std::vector<int> sz{n};
    for (int l = 0; l < kJp2kLevels; ++l) sz.push_back((sz.back() + 1) / 2);
    auto probe = [&](int x, int y) {
      std::vector<double> c(static_cast<std::size_t>(n) * n, 0.0);
      c[static_cast<std::size_t>(y) * n + x] = 1.0;
      transforms::inv97_2d(c, n, n, kJp2kLevels);
      double s = 0.0;
      for (double v : c) s += v * v;
      return std::sqrt(s);
    };
    const int ll = sz[kJp2kLevels];
    g[0] = probe(ll / 2, ll / 2);
    for (int l = 0; l < kJp2kLevels; ++l) {
      const int outer = sz[l], inner = sz[l + 1];
      const int mid_hi = (inner + outer) / 2, mid_lo = inner / 2;
      const int base = 1 + 3 * (kJp2kLevels - 1 - l);
      g[base + 0] = probe(mid_hi, mid_lo);
      g[base + 1] = probe(mid_lo, mid_hi);
      g[base + 2] = probe(mid_hi, mid_hi);
    }
    return g;
  }();
  return gains;
}

inline ImagePlane jp2k_sim(const ImagePlane& img, double scale) {
  const int w = img.width(), h = img.height();
  std::vector<double> c(img.values());
  for (double& v : c) v -= 128.0;
  transforms::fwd97_2d(c, w, h, kJp2kLevels);
  const auto& gains = jp2k_subband_gains();
  const auto bands = transforms::subband_map(w, h, kJp2kLevels);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double step = kJp2kBaseStep * scale / gains[bands[i]];
    const double q = std::floor(std::abs(c[i]) / step);
    c[i] = q == 0.0 ? 0.0 : std::copysign((q + 0.5) * step, c[i]);
  }
  transforms::inv97_2d(c, w, h, kJp2kLevels);
  for (double& v : c) v += 128.0;
  return ImagePlane(w, h, std::move(c));
}

}  // namespace distort_detail

/// Applies one distortion operator. Blur and noise clamp to [0,255] (noise only);
/// the compression simulators return unclamped reconstructions.
inline ImagePlane apply(const ImagePlane& img, const DistortionSpec& spec, Seed seed) {
  if (!(spec.param >= 0.0) || !std::isfinite(spec.param))
    throw DomainError("apply: distortion parameter must be finite and >= 0");
  switch (spec.kind) {
    case DistortionType::GaussianBlur:
      return gaussian_blur(img, spec.param);
    case DistortionType::GaussianNoise: {
      if (spec.param == 0.0) return img;
      ImagePlane out = img;
      NormalSource rng(seed);
      for (double& v : out.pixels()) v = std::clamp(v + spec.param * rng.next(), 0.0, 255.0);
      return out;
    }
    case DistortionType::JpegSim:
    case DistortionType::Jp2kSim:
      if (img.width() < 32 || img.height() < 32)
        throw DomainError("apply: compression simulators need at least 32x32 input");
      if (spec.param == 0.0) return img;
      return spec.kind == DistortionType::JpegSim ? distort_detail::jpeg_sim(img, spec.param)
                                                  : distort_detail::jp2k_sim(img, spec.param);
  }
  throw DomainError("apply: unknown distortion kind");
}

/// Per-stage seed; independent of the stage-2 level so a DR is shared by all its FDs.
inline Seed derive_stage_seed(Seed seed, int stage, int level1) {
  return mix64(seed, static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(level1));
}

struct TwoStageResult {
  ImagePlane dr;
  ImagePlane fd;
};

inline ImagePlane run_stage1(const ImagePlane& pristine, DistortionType kind, int level1, Seed seed) {
  return apply(pristine, resolve_ladder(kind, 1, level1), derive_stage_seed(seed, 1, level1));
}

inline ImagePlane run_stage2(const ImagePlane& dr, DistortionType kind, int level1, int level2,
                             Seed seed) {
  return apply(dr, resolve_ladder(kind, 2, level2), derive_stage_seed(seed, 2, level1));
}

inline TwoStageResult run_two_stage(const ImagePlane& pristine, ComboType combo, int level1,
                                    int level2, Seed seed) {
  if (!is_generating(combo))
    throw DomainError("run_two_stage: combo must be one of the five generating combinations");
  const auto [s1, s2] = combo_stages(combo);
  ImagePlane dr = run_stage1(pristine, s1, level1, seed);
  ImagePlane fd = run_stage2(dr, s2, level1, level2, seed);
  return {std::move(dr), std::move(fd)};
}

}  // namespace driqa

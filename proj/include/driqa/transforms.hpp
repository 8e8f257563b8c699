#pragma once

// Block DCT and CDF 9/7 lifting wavelet used by the compression simulators.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "driqa/image.hpp"

namespace driqa::transforms {

/// Orthonormal 8-point DCT-II basis, basis[k][n].
inline const std::array<std::array<double, 8>, 8>& dct8_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> b{};
    for (int k = 0; k < 8; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n)
        b[k][n] = scale * std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
    }
    return b;
  }();
  return basis;
}

using Block8 = std::array<double, 64>;

inline Block8 dct8x8(const Block8& in) {
  const auto& b = dct8_basis();
  Block8 tmp{}, out{};
  for (int y = 0; y < 8; ++y)
    for (int k = 0; k < 8; ++k) {
      double acc = 0.0;
      for (int n = 0; n < 8; ++n) acc += b[k][n] * in[y * 8 + n];
      tmp[y * 8 + k] = acc;
    }
  for (int x = 0; x < 8; ++x)
    for (int k = 0; k < 8; ++k) {
      double acc = 0.0;
      for (int n = 0; n < 8; ++n) acc += b[k][n] * tmp[n * 8 + x];
      out[k * 8 + x] = acc;
    }
  return out;
}

inline Block8 idct8x8(const Block8& in) {
  const auto& b = dct8_basis();
  Block8 tmp{}, out{};
  for (int x = 0; x < 8; ++x)
    for (int n = 0; n < 8; ++n) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) acc += b[k][n] * in[k * 8 + x];
      tmp[n * 8 + x] = acc;
    }
  for (int y = 0; y < 8; ++y)
    for (int n = 0; n < 8; ++n) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) acc += b[k][n] * tmp[y * 8 + k];
      out[y * 8 + n] = acc;
    }
  return out;
}

namespace detail {

// Lifting coefficients of the irreversible CDF 9/7 filter pair.
inline constexpr double kAlpha = -1.586134342059924;
inline constexpr double kBeta = -0.052980118572961;
inline constexpr double kGamma = 0.882911075530934;
inline constexpr double kDelta = 0.443506852043971;
inline constexpr double kK = 1.230174104914001;

// Whole-sample symmetric extension.
inline int wsym(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

inline void lift(std::vector<double>& x, int parity, double c) {
  const int n = static_cast<int>(x.size());
  for (int i = parity; i < n; i += 2) x[i] += c * (x[wsym(i - 1, n)] + x[wsym(i + 1, n)]);
}

}  // namespace detail

/// In-place 1-D forward transform; output is [lowpass | highpass], lowpass length ceil(n/2).
inline void fwd97(std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) return;
  detail::lift(x, 1, detail::kAlpha);
  detail::lift(x, 0, detail::kBeta);
  detail::lift(x, 1, detail::kGamma);
  detail::lift(x, 0, detail::kDelta);
  std::vector<double> out(n);
  const int nl = (n + 1) / 2;
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0) out[i / 2] = x[i] / detail::kK;
    else out[nl + i / 2] = x[i] * detail::kK;
  }
  x.swap(out);
}

inline void inv97(std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) return;
  const int nl = (n + 1) / 2;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0) out[i] = x[i / 2] * detail::kK;
    else out[i] = x[nl + i / 2] / detail::kK;
  }
  detail::lift(out, 0, -detail::kDelta);
  detail::lift(out, 1, -detail::kGamma);
  detail::lift(out, 0, -detail::kBeta);
  detail::lift(out, 1, -detail::kAlpha);
  x.swap(out);
}

/// Multi-level 2-D wavelet decomposition on a w x h coefficient array (row-major).
/// Level l operates on the top-left region produced by level l-1.
inline void fwd97_2d(std::vector<double>& c, int w, int h, int levels) {
  int cw = w, ch = h;
  std::vector<double> line;
  for (int l = 0; l < levels; ++l) {
    line.resize(cw);
    for (int y = 0; y < ch; ++y) {
      for (int x = 0; x < cw; ++x) line[x] = c[static_cast<std::size_t>(y) * w + x];
      fwd97(line);
      for (int x = 0; x < cw; ++x) c[static_cast<std::size_t>(y) * w + x] = line[x];
    }
    line.resize(ch);
    for (int x = 0; x < cw; ++x) {
      for (int y = 0; y < ch; ++y) line[y] = c[static_cast<std::size_t>(y) * w + x];
      fwd97(line);
      for (int y = 0; y < ch; ++y) c[static_cast<std::size_t>(y) * w + x] = line[y];
    }
    cw = (cw + 1) / 2;
    ch = (ch + 1) / 2;
  }
}

inline void inv97_2d(std::vector<double>& c, int w, int h, int levels) {
  std::vector<int> ws{w}, hs{h};
  for (int l = 1; l < levels; ++l) {
    ws.push_back((ws.back() + 1) / 2);
    hs.push_back((hs.back() + 1) / 2);
  }
  std::vector<double> line;
  for (int l = levels - 1; l >= 0; --l) {
    const int cw = ws[l], ch = hs[l];
    line.resize(ch);
    for (int x = 0; x < cw; ++x) {
      for (int y = 0; y < ch; ++y) line[y] = c[static_cast<std::size_t>(y) * w + x];
      inv97(line);
      for (int y = 0; y < ch; ++y) c[static_cast<std::size_t>(y) * w + x] = line[y];
    }
    line.resize(cw);
    for (int y = 0; y < ch; ++y) {
      for (int x = 0; x < cw; ++x) line[x] = c[static_cast<std::size_t>(y) * w + x];
      inv97(line);
      for (int x = 0; x < cw; ++x) c[static_cast<std::size_t>(y) * w + x] = line[x];
    }
  }
}

/// Subband index of coefficient (x, y) after `levels` decompositions:
/// 0 = final LL, then 3 per level (HL, LH, HH) ordered from coarsest to finest.
inline int subband_of(int x, int y, int w, int h, int levels) {
  std::vector<int> ws{w}, hs{h};
  for (int l = 0; l < levels; ++l) {
    ws.push_back((ws.back() + 1) / 2);
    hs.push_back((hs.back() + 1) / 2);
  }
  for (int l = 0; l < levels; ++l) {
    const int lw = ws[l + 1], lh = hs[l + 1];
    if (x < ws[l] && y < hs[l] && (x >= lw || y >= lh)) {
      const int orient = (x >= lw && y < lh) ? 0 : (x < lw && y >= lh) ? 1 : 2;
      return 1 + 3 * (levels - 1 - l) + orient;
    }
  }
  return 0;
}

/// subband_of for every coefficient, row-major.
inline std::vector<int> subband_map(int w, int h, int levels) {
  std::vector<int> ws{w}, hs{h};
  for (int l = 0; l < levels; ++l) {
    ws.push_back((ws.back() + 1) / 2);
    hs.push_back((hs.back() + 1) / 2);
  }
  std::vector<int> map(static_cast<std::size_t>(w) * h, 0);
  for (int l = levels - 1; l >= 0; --l) {
    const int lw = ws[l + 1], lh = hs[l + 1];
    for (int y = 0; y < hs[l]; ++y)
      for (int x = 0; x < ws[l]; ++x) {
        if (x < lw && y < lh) continue;
        const int orient = (x >= lw && y < lh) ? 0 : (x < lw && y >= lh) ? 1 : 2;
        map[static_cast<std::size_t>(y) * w + x] = 1 + 3 * (levels - 1 - l) + orient;
      }
  }
  return map;
}

}  // namespace driqa::transforms

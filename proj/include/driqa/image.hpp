#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driqa/errors.hpp"

namespace driqa {

/// Single-channel floating-point raster, row-major, nominal range [0, 255].
///
/// Samples are always finite. Metric and distortion operators state their own
/// minimum sizes; the plane itself only requires non-empty dimensions.
class ImagePlane {
 public:
  ImagePlane() = default;

  ImagePlane(int width, int height, double fill = 0.0)
      : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
    if (!std::isfinite(fill)) throw DomainError("ImagePlane: non-finite fill value");
  }

  ImagePlane(int width, int height, std::vector<double> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height)
      throw DomainError("ImagePlane: data length does not match dimensions");
    for (double v : data_)
      if (!std::isfinite(v)) throw DomainError("ImagePlane: non-finite sample");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  double& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<const double> pixels() const noexcept { return data_; }
  std::span<double> pixels() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool same_dims(const ImagePlane& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  double mean() const noexcept {
    double s = 0.0;
    for (double v : data_) s += v;
    return data_.empty() ? 0.0 : s / static_cast<double>(data_.size());
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  static void check_dims(int w, int h) {
    if (w < 1 || h < 1) throw DomainError("ImagePlane: dimensions must be positive");
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Interleaved 8-bit RGB image as read from disk.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // R,G,B per pixel, row-major

  bool valid() const noexcept {
    return width > 0 && height > 0 &&
           data.size() == 3 * static_cast<std::size_t>(width) * height;
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Rec.601 luma, unrounded.
inline ImagePlane to_luminance(const RgbImage& img) {
  if (!img.valid()) throw DomainError("to_luminance: malformed RgbImage");
  std::vector<double> y(static_cast<std::size_t>(img.width) * img.height);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto* p = &img.data[3 * i];
    // Gray pixels map to themselves exactly (the weights sum to 1).
    y[i] = (p[0] == p[1] && p[1] == p[2]) ? p[0] : 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return ImagePlane(img.width, img.height, std::move(y));
}

/// Replicates a plane into R=G=B after clamping to [0,255] and rounding half away from zero.
inline RgbImage to_rgb(const ImagePlane& plane) {
  RgbImage out{plane.width(), plane.height(), {}};
  out.data.resize(3 * plane.size());
  auto px = plane.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto v = static_cast<std::uint8_t>(std::round(std::clamp(px[i], 0.0, 255.0)));
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = v;
  }
  return out;
}

/// The 8-bit storage projection applied at save time.
inline ImagePlane quantize8(const ImagePlane& plane) {
  ImagePlane out = plane;
  for (double& v : out.pixels()) v = std::round(std::clamp(v, 0.0, 255.0));
  return out;
}

/// Half-sample symmetric reflection of an index into [0, n): ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int mirror_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

/// Normalized 1-D Gaussian taps of length 2*radius+1.
inline std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Separable convolution with mirror boundaries; output has the input's dims.
inline ImagePlane convolve_separable(const ImagePlane& img, std::span<const double> kernel) {
  const int w = img.width(), h = img.height();
  const int r = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(img.size());
  std::vector<int> xi(w + 2 * r), yi(h + 2 * r);
  for (int i = -r; i < w + r; ++i) xi[i + r] = mirror_index(i, w);
  for (int i = -r; i < h + r; ++i) yi[i + r] = mirror_index(i, h);
  auto src = img.pixels();
  for (int y = 0; y < h; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * r; ++k) acc += kernel[k] * row[xi[x + k]];
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  std::vector<double> out(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * r; ++k)
        acc += kernel[k] * tmp[static_cast<std::size_t>(yi[y + k]) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return ImagePlane(w, h, std::move(out));
}

/// Gaussian blur, kernel radius ceil(3*sigma). sigma == 0 is the identity.
inline ImagePlane gaussian_blur(const ImagePlane& img, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto k = gaussian_kernel(sigma, radius);
  return convolve_separable(img, k);
}

/// 2x2 box mean followed by decimation; odd trailing rows/columns are dropped.
inline ImagePlane downsample2(const ImagePlane& img) {
  if (img.width() < 2 || img.height() < 2)
    throw DomainError("downsample2: image must be at least 2x2");
  const int w = img.width() / 2, h = img.height() / 2;
  ImagePlane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out(x, y) = 0.25 * (img(2 * x, 2 * y) + img(2 * x + 1, 2 * y) +
                          img(2 * x, 2 * y + 1) + img(2 * x + 1, 2 * y + 1));
  return out;
}

}  // namespace driqa

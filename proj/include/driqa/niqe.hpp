#pragma once

// NIQE: distance between the natural-scene-statistics of an image and a
// multivariate Gaussian model fitted on pristine images.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <sstream>
#include <string>
#include <vector>

#include "driqa/errors.hpp"
#include "driqa/image.hpp"
#include "driqa/parallel.hpp"

namespace driqa {

namespace niqe_const {
inline constexpr int kPatchSize = 96;
inline constexpr double kSharpnessThreshold = 0.75;
inline constexpr int kFeatureDim = 36;
inline constexpr int kFeaturesPerScale = 18;
inline constexpr int kMscnRadius = 3;  // 7x7 window
inline constexpr double kMscnSigma = 7.0 / 6.0;
inline constexpr double kAlphaMin = 0.2;
inline constexpr double kAlphaMax = 10.0;
inline constexpr double kAlphaStep = 0.001;
inline constexpr int kMinTrainImages = 10;
inline constexpr int kMinTrainSide = 192;
}  // namespace niqe_const

using FeatureVector = Eigen::Matrix<double, niqe_const::kFeatureDim, 1>;
using FeatureMatrix = Eigen::Matrix<double, niqe_const::kFeatureDim, niqe_const::kFeatureDim>;

/// Pristine multivariate Gaussian: feature mean and covariance.
struct NiqeModel {
  FeatureVector mean = FeatureVector::Zero();
  FeatureMatrix covariance = FeatureMatrix::Zero();
};

struct MscnResult {
  ImagePlane coefficients;
  ImagePlane local_sigma;
};

/// Mean-subtracted contrast-normalized coefficients (I - mu) / (sigma + 1) with
/// 7x7 Gaussian-weighted local moments; also returns the local sigma map.
inline MscnResult mscn_with_sigma(const ImagePlane& img) {
  const auto k = gaussian_kernel(niqe_const::kMscnSigma, niqe_const::kMscnRadius);
  const ImagePlane mu = convolve_separable(img, k);
  ImagePlane sq = img;
  for (double& v : sq.pixels()) v *= v;
  const ImagePlane mu_sq = convolve_separable(sq, k);
  ImagePlane out(img.width(), img.height()), sigma(img.width(), img.height());
  auto o = out.pixels(), s = sigma.pixels();
  auto i = img.pixels(), m = mu.pixels(), m2 = mu_sq.pixels();
  for (std::size_t p = 0; p < o.size(); ++p) {
    s[p] = std::sqrt(std::abs(m2[p] - m[p] * m[p]));
    o[p] = (i[p] - m[p]) / (s[p] + 1.0);
  }
  return {std::move(out), std::move(sigma)};
}

inline ImagePlane mscn(const ImagePlane& img) {
  if (img.width() < niqe_const::kPatchSize || img.height() < niqe_const::kPatchSize)
    throw DomainError("mscn: image must be at least 96x96");
  return mscn_with_sigma(img).coefficients;
}

/// Asymmetric generalized Gaussian parameters.
struct AggdParams {
  double alpha = 0.0;    // shape
  double sigma_l = 0.0;  // left scale (std of negative samples)
  double sigma_r = 0.0;  // right scale (std of positive samples)

  /// Mean of the fitted distribution.
  double mean() const {
    return (sigma_r - sigma_l) * std::tgamma(2.0 / alpha) /
           std::sqrt(std::tgamma(1.0 / alpha) * std::tgamma(3.0 / alpha));
  }
};

namespace niqe_detail {

// Gamma-ratio lookup r(alpha) = G(2/a)^2 / (G(1/a) G(3/a)) over the alpha grid.
struct AlphaTable {
  std::vector<double> alpha, ratio;
};

inline const AlphaTable& alpha_table() {
  static const AlphaTable t = [] {
    AlphaTable tab;
    const int n = static_cast<int>(std::lround((niqe_const::kAlphaMax - niqe_const::kAlphaMin) /
                                               niqe_const::kAlphaStep)) + 1;
    for (int i = 0; i < n; ++i) {
      const double a = niqe_const::kAlphaMin + i * niqe_const::kAlphaStep;
      tab.alpha.push_back(a);
      tab.ratio.push_back(std::exp(2.0 * std::lgamma(2.0 / a) - std::lgamma(1.0 / a) -
                                   std::lgamma(3.0 / a)));
    }
    return tab;
  }();
  return t;
}

}  // namespace niqe_detail

/// Moment-matching AGGD fit over the alpha grid 0.2..10 (step 0.001).
inline AggdParams fit_aggd(std::span<const double> samples) {
  if (samples.size() < 100) throw DomainError("fit_aggd: need at least 100 samples");
  double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0, sq_sum = 0.0;
  std::size_t n_left = 0, n_right = 0;
  for (double v : samples) {
    if (v < 0) {
      left_sq += v * v;
      ++n_left;
    } else if (v > 0) {
      right_sq += v * v;
      ++n_right;
    }
    abs_sum += std::abs(v);
    sq_sum += v * v;
  }
  if (sq_sum == 0.0) throw DegenerateInput("fit_aggd: all samples are zero");
  const double n = static_cast<double>(samples.size());
  double sl = n_left ? std::sqrt(left_sq / n_left) : 0.0;
  double sr = n_right ? std::sqrt(right_sq / n_right) : 0.0;
  // One-sided data: fall back to the symmetric model for the missing side.
  if (sl == 0.0) sl = sr;
  if (sr == 0.0) sr = sl;
  const double gamma_hat = sl / sr;
  const double mean_abs = abs_sum / n;
  const double r_hat = mean_abs * mean_abs / (sq_sum / n);
  const double r_norm = r_hat * (gamma_hat * gamma_hat * gamma_hat + 1.0) * (gamma_hat + 1.0) /
                        ((gamma_hat * gamma_hat + 1.0) * (gamma_hat * gamma_hat + 1.0));
  const auto& tab = niqe_detail::alpha_table();
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tab.ratio.size(); ++i) {
    const double e = (tab.ratio[i] - r_norm) * (tab.ratio[i] - r_norm);
    if (e < best_err) {
      best_err = e;
      best = i;
    }
  }
  return {tab.alpha[best], sl, sr};
}

namespace niqe_detail {

inline constexpr std::array<std::array<int, 2>, 4> kShifts = {{{0, 1}, {1, 0}, {1, 1}, {-1, 1}}};

// Circularly shifted copy: out(x, y) = in(x - dx, y - dy), matching circshift(in, [dy dx]).
inline ImagePlane circshift(const ImagePlane& in, int dy, int dx) {
  const int w = in.width(), h = in.height();
  ImagePlane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(x, y) = in(((x - dx) % w + w) % w, ((y - dy) % h + h) % h);
  return out;
}

inline std::vector<double> extract(const ImagePlane& p, int x0, int y0, int size) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(size) * size);
  for (int y = y0; y < y0 + size; ++y)
    for (int x = x0; x < x0 + size; ++x) v.push_back(p(x, y));
  return v;
}

// Degenerate (all-zero) patches get the flattest shape on the grid and zero scale.
inline AggdParams fit_or_flat(std::span<const double> v) {
  try {
    return fit_aggd(v);
  } catch (const DegenerateInput&) {
    return {niqe_const::kAlphaMax, 0.0, 0.0};
  }
}

// 18 features of one patch at one scale.
inline void patch_features(const ImagePlane& coef, const std::array<ImagePlane, 4>& products,
                           int x0, int y0, int size, double* out) {
  const auto base = fit_or_flat(extract(coef, x0, y0, size));
  out[0] = base.alpha;
  out[1] = 0.5 * (base.sigma_l * base.sigma_l + base.sigma_r * base.sigma_r);
  for (int o = 0; o < 4; ++o) {
    const auto p = fit_or_flat(extract(products[o], x0, y0, size));
    out[2 + 4 * o] = p.alpha;
    out[3 + 4 * o] = p.sigma_l > 0.0 ? p.mean() : 0.0;
    out[4 + 4 * o] = p.sigma_l * p.sigma_l;
    out[5 + 4 * o] = p.sigma_r * p.sigma_r;
  }
}

struct PatchFeatures {
  std::vector<FeatureVector> features;
  std::vector<double> sharpness;  // mean local sigma of the scale-1 patch
};

inline PatchFeatures image_patch_features(const ImagePlane& img) {
  const int ps = niqe_const::kPatchSize;
  const int nx = img.width() / ps, ny = img.height() / ps;
  PatchFeatures pf;
  pf.features.assign(static_cast<std::size_t>(nx) * ny, FeatureVector::Zero());
  pf.sharpness.assign(pf.features.size(), 0.0);
  ImagePlane scaled = img;
  for (int scale = 0; scale < 2; ++scale) {
    const int size = ps >> scale;
    const auto m = mscn_with_sigma(scaled);
    std::array<ImagePlane, 4> prod;
    for (int o = 0; o < 4; ++o) {
      prod[o] = circshift(m.coefficients, kShifts[o][0], kShifts[o][1]);
      auto pv = prod[o].pixels();
      auto cv = m.coefficients.pixels();
      for (std::size_t i = 0; i < pv.size(); ++i) pv[i] *= cv[i];
    }
    for (int by = 0; by < ny; ++by)
      for (int bx = 0; bx < nx; ++bx) {
        const std::size_t idx = static_cast<std::size_t>(by) * nx + bx;
        patch_features(m.coefficients, prod, bx * size, by * size, size,
                       pf.features[idx].data() + scale * niqe_const::kFeaturesPerScale);
        if (scale == 0) {
          const auto s = extract(m.local_sigma, bx * size, by * size, size);
          double acc = 0.0;
          for (double v : s) acc += v;
          pf.sharpness[idx] = acc / static_cast<double>(s.size());
        }
      }
    if (scale == 0) scaled = downsample2(scaled);
  }
  return pf;
}

inline FeatureMatrix covariance(const std::vector<FeatureVector>& rows, const FeatureVector& mean) {
  FeatureMatrix c = FeatureMatrix::Zero();
  if (rows.size() < 2) return c;
  for (const auto& r : rows) {
    const FeatureVector d = r - mean;
    c.noalias() += d * d.transpose();
  }
  c /= static_cast<double>(rows.size() - 1);
  return 0.5 * (c + c.transpose());
}

inline FeatureVector mean_of(const std::vector<FeatureVector>& rows) {
  FeatureVector m = FeatureVector::Zero();
  for (const auto& r : rows) m += r;
  return m / static_cast<double>(rows.size());
}

}  // namespace niqe_detail

/// Fits the pristine model. Patches are kept when their sharpness exceeds
/// 0.75 x the sharpest patch of the same image.
inline NiqeModel train_niqe(const std::vector<ImagePlane>& corpus) {
  if (static_cast<int>(corpus.size()) < niqe_const::kMinTrainImages)
    throw DomainError("train_niqe: corpus needs at least 10 images");
  for (const auto& img : corpus)
    if (img.width() < niqe_const::kMinTrainSide || img.height() < niqe_const::kMinTrainSide)
      throw DomainError("train_niqe: corpus images must be at least 192x192");
  std::vector<niqe_detail::PatchFeatures> per_image(corpus.size());
  parallel_for(corpus.size(),
               [&](std::size_t i) { per_image[i] = niqe_detail::image_patch_features(corpus[i]); });
  std::vector<FeatureVector> selected;
  for (const auto& pf : per_image) {
    const double peak = *std::max_element(pf.sharpness.begin(), pf.sharpness.end());
    if (peak <= 0.0) continue;
    for (std::size_t j = 0; j < pf.features.size(); ++j)
      if (pf.sharpness[j] > niqe_const::kSharpnessThreshold * peak) selected.push_back(pf.features[j]);
  }
  if (selected.size() < 2) throw DegenerateInput("train_niqe: no patch passes the sharpness gate");
  NiqeModel model;
  model.mean = niqe_detail::mean_of(selected);
  model.covariance = niqe_detail::covariance(selected, model.mean);
  return model;
}

/// Symmetric pseudo-inverse via eigen-decomposition.
inline FeatureMatrix pseudo_inverse(const FeatureMatrix& m) {
  Eigen::SelfAdjointEigenSolver<FeatureMatrix> es(m);
  const auto& ev = es.eigenvalues();
  const double tol = niqe_const::kFeatureDim * std::numeric_limits<double>::epsilon() *
                     std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  FeatureVector inv;
  for (int i = 0; i < niqe_const::kFeatureDim; ++i) inv[i] = std::abs(ev[i]) > tol ? 1.0 / ev[i] : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Distance between a feature population (mean, covariance) and the model.
inline double niqe_distance(const NiqeModel& model, const FeatureVector& mean,
                            const FeatureMatrix& cov) {
  const FeatureVector d = model.mean - mean;
  const FeatureMatrix pooled = 0.5 * (model.covariance + cov);
  const double q = d.dot(pseudo_inverse(pooled) * d);
  return std::sqrt(std::max(q, 0.0));
}

/// NIQE score, lower is better.
inline double niqe_score(const ImagePlane& img, const NiqeModel& model) {
  if (img.width() < niqe_const::kPatchSize || img.height() < niqe_const::kPatchSize)
    throw DomainError("niqe_score: image must be at least 96x96");
  const auto pf = niqe_detail::image_patch_features(img);
  const FeatureVector mean = niqe_detail::mean_of(pf.features);
  return niqe_distance(model, mean, niqe_detail::covariance(pf.features, mean));
}

/// Text serialization: header line, mean row, then 36 covariance rows, %.17g.
inline void save_niqe_model(const std::filesystem::path& path, const NiqeModel& model) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write NIQE model '" + path.string() + "'");
  char buf[32];
  os << "niqe-model " << niqe_const::kFeatureDim << '\n';
  for (int i = 0; i < niqe_const::kFeatureDim; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", model.mean[i]);
    os << (i ? " " : "") << buf;
  }
  os << '\n';
  for (int r = 0; r < niqe_const::kFeatureDim; ++r) {
    for (int c = 0; c < niqe_const::kFeatureDim; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", model.covariance(r, c));
      os << (c ? " " : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw IoError("write failed for '" + path.string() + "'");
}

inline NiqeModel load_niqe_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open NIQE model '" + path.string() + "'");
  std::string tag;
  int dim = 0;
  if (!(is >> tag >> dim) || tag != "niqe-model" || dim != niqe_const::kFeatureDim)
    throw FormatError("not a NIQE model file: '" + path.string() + "'");
  NiqeModel m;
  for (int i = 0; i < dim; ++i)
    if (!(is >> m.mean[i])) throw FormatError("truncated NIQE model '" + path.string() + "'");
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (!(is >> m.covariance(r, c))) throw FormatError("truncated NIQE model '" + path.string() + "'");
  return m;
}

/// NR backends. Only NIQE is implemented; the learned-model backends report Unsupported.
enum class NrBackend { Niqe, Cornia, DipIq };

inline std::string_view to_string(NrBackend b) {
  switch (b) {
    case NrBackend::Niqe: return "niqe";
    case NrBackend::Cornia: return "cornia";
    case NrBackend::DipIq: return "dipiq";
  }
  return "?";
}

inline std::optional<NrBackend> parse_nr_backend(std::string_view s) {
  if (s == "niqe") return NrBackend::Niqe;
  if (s == "cornia") return NrBackend::Cornia;
  if (s == "dipiq") return NrBackend::DipIq;
  return std::nullopt;
}

inline double nr_score(NrBackend backend, const ImagePlane& img, const NiqeModel& model) {
  if (backend != NrBackend::Niqe)
    throw Unsupported("NR backend '" + std::string(to_string(backend)) +
                      "' requires an external learned model and is not available");
  return niqe_score(img, model);
}

}  // namespace driqa

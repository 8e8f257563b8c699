#pragma once

#include <algorithm>

#include "driqa/fr_metrics.hpp"
#include "driqa/logistic.hpp"
#include "driqa/niqe.hpp"

namespace driqa {

enum class BaselineKind { Baseline1, Baseline2, Baseline3 };

/// RS_FD alone.
inline double baseline1(const ImagePlane& dr, const ImagePlane& fd, FrBackend backend) {
  return fr_score(backend, dr, fd);
}

/// NR score of the FD image (lower is better for NIQE).
inline double baseline2(const ImagePlane& fd, const NiqeModel& model) { return niqe_score(fd, model); }

/// Product of the mapped NR score of the DR image and MS-SSIM(DR, FD).
inline double baseline3_combine(double mapped_nr_dr, double msssim_dr_fd) {
  return std::clamp(mapped_nr_dr, 0.0, 1.0) * msssim_dr_fd;
}

inline double baseline3(const ImagePlane& dr, const ImagePlane& fd, const NiqeModel& model,
                        const LogisticParams& nr_to_msssim) {
  return baseline3_combine(nr_to_msssim(niqe_score(dr, model)), msssim(dr, fd));
}

}  // namespace driqa

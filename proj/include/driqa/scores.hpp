#pragma once

// Per-FD score table computed from a manifest's image files.

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "driqa/fr_metrics.hpp"
#include "driqa/image_io.hpp"
#include "driqa/manifest.hpp"
#include "driqa/niqe.hpp"
#include "driqa/parallel.hpp"

namespace driqa {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ScoreRow {
  std::string fd_id, dr_id, pristine_id;
  ComboType combo = ComboType::BlurJpeg;
  int level1 = 0, level2 = 0;
  double label = kNaN;
  // Indexed by FrBackend; NaN when that backend was not requested.
  std::array<double, 2> as_dr{kNaN, kNaN}, rs_fd{kNaN, kNaN}, as_fd{kNaN, kNaN};
  double niqe_dr = kNaN, niqe_fd = kNaN;

  static constexpr std::size_t idx(FrBackend b) { return b == FrBackend::Ssim ? 0 : 1; }
  double as_dr_of(FrBackend b) const { return as_dr[idx(b)]; }
  double rs_fd_of(FrBackend b) const { return rs_fd[idx(b)]; }
  double as_fd_of(FrBackend b) const { return as_fd[idx(b)]; }
};

struct ScoreOptions {
  bool ssim = true;
  bool msssim = false;
  const NiqeModel* niqe = nullptr;  // NR score of every DR image
  bool niqe_fd = false;             // also the NR score of every FD image
};

/// Scores every FD record (in manifest order). DR-side values are computed
/// once per DR image.
inline std::vector<ScoreRow> score_manifest(const DatasetManifest& m, const ScoreOptions& opt) {
  std::vector<const ManifestRecord*> fds;
  std::map<std::string, const ManifestRecord*> drs;
  for (const auto& r : m.records) {
    if (r.role != Role::FD) continue;
    const auto* dr = m.dr_of(r);
    const auto* pr = m.pr_of(r);
    if (!dr || !pr) throw DomainError("score_manifest: " + r.id + " has no DR/PR record");
    fds.push_back(&r);
    drs.emplace(dr->id, dr);
  }
  if (fds.empty()) throw DomainError("score_manifest: manifest holds no FD records");

  std::map<std::string, ImagePlane> pr_planes;
  for (const auto& r : m.records)
    if (r.role == Role::PR) pr_planes.emplace(r.id, load_plane(m.resolve(r)));

  struct DrScores {
    std::array<double, 2> as{kNaN, kNaN};
    double niqe = kNaN;
  };
  std::vector<const ManifestRecord*> dr_list;
  for (const auto& [id, rec] : drs) dr_list.push_back(rec);
  std::vector<DrScores> dr_scores(dr_list.size());
  parallel_for(dr_list.size(), [&](std::size_t i) {
    const auto& rec = *dr_list[i];
    const ImagePlane dr = load_plane(m.resolve(rec));
    const ImagePlane& pr = pr_planes.at(rec.pristine_id);
    if (opt.ssim) dr_scores[i].as[0] = ssim_score(pr, dr);
    if (opt.msssim) dr_scores[i].as[1] = msssim(pr, dr);
    if (opt.niqe) dr_scores[i].niqe = niqe_score(dr, *opt.niqe);
  });
  std::map<std::string, std::size_t> dr_pos;
  for (std::size_t i = 0; i < dr_list.size(); ++i) dr_pos[dr_list[i]->id] = i;

  std::vector<ScoreRow> rows(fds.size());
  parallel_for(fds.size(), [&](std::size_t i) {
    const auto& rec = *fds[i];
    const auto* drrec = m.dr_of(rec);
    const ImagePlane fd = load_plane(m.resolve(rec));
    const ImagePlane dr = load_plane(m.resolve(*drrec));
    const ImagePlane& pr = pr_planes.at(rec.pristine_id);
    ScoreRow& row = rows[i];
    row.fd_id = rec.id;
    row.dr_id = drrec->id;
    row.pristine_id = rec.pristine_id;
    row.combo = *rec.combo_type();
    row.level1 = rec.level1;
    row.level2 = rec.level2;
    row.label = rec.label.value_or(kNaN);
    const auto& ds = dr_scores[dr_pos.at(drrec->id)];
    row.as_dr = ds.as;
    row.niqe_dr = ds.niqe;
    if (opt.ssim) {
      row.rs_fd[0] = ssim_score(dr, fd);
      row.as_fd[0] = ssim_score(pr, fd);
    }
    if (opt.msssim) {
      row.rs_fd[1] = msssim(dr, fd);
      row.as_fd[1] = msssim(pr, fd);
    }
    if (opt.niqe && opt.niqe_fd) row.niqe_fd = niqe_score(fd, *opt.niqe);
  });
  return rows;
}

inline std::vector<ScoreRow> rows_in_group(const std::vector<ScoreRow>& rows, ComboType group) {
  std::vector<ScoreRow> out;
  for (const auto& r : rows)
    if (combo_in_group(r.combo, group)) out.push_back(r);
  return out;
}

}  // namespace driqa

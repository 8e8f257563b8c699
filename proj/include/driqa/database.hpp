#pragma once

// Two-stage database construction and benchmark annotation.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "driqa/distortions.hpp"
#include "driqa/errors.hpp"
#include "driqa/fr_metrics.hpp"
#include "driqa/image_io.hpp"
#include "driqa/manifest.hpp"
#include "driqa/parallel.hpp"
#include "driqa/rng.hpp"

namespace driqa {

struct ScaleSpec {
  std::vector<int> levels1;
  std::vector<int> levels2;
  std::vector<ComboType> combos;

  static ScaleSpec full() {
    ScaleSpec s;
    s.levels1.resize(kStage1Levels);
    s.levels2.resize(kStage2Levels);
    std::iota(s.levels1.begin(), s.levels1.end(), 1);
    std::iota(s.levels2.begin(), s.levels2.end(), 1);
    s.combos.assign(kGeneratingCombos.begin(), kGeneratingCombos.end());
    return s;
  }

  void validate() const {
    auto check = [](const std::vector<int>& v, int hi, const char* name) {
      if (v.empty()) throw DomainError(std::string(name) + " is empty");
      std::set<int> seen;
      for (int l : v) {
        if (l < 1 || l > hi)
          throw DomainError(std::string(name) + " level " + std::to_string(l) + " outside 1.." +
                            std::to_string(hi));
        if (!seen.insert(l).second) throw DomainError(std::string(name) + " repeats level " + std::to_string(l));
      }
    };
    check(levels1, kStage1Levels, "levels1");
    check(levels2, kStage2Levels, "levels2");
    if (combos.empty()) throw DomainError("no distortion combinations selected");
    for (auto c : combos)
      if (!is_generating(c)) throw DomainError("combo " + std::string(to_string(c)) + " does not generate images");
  }
};

struct DatasetCounts {
  std::size_t dr_per_type = 0;
  std::size_t fd_per_combo = 0;
  std::size_t total_distorted = 0;
};

/// |DR| = P x 3 x |L1| split over the three stage-1 types; |FD| = P x |combos| x |L1| x |L2|.
inline DatasetCounts expected_counts(std::size_t pristine, const ScaleSpec& s) {
  DatasetCounts c;
  c.dr_per_type = pristine * s.levels1.size();
  c.fd_per_combo = pristine * s.levels1.size() * s.levels2.size();
  c.total_distorted = c.dr_per_type * kStage1Types.size() + c.fd_per_combo * s.combos.size();
  return c;
}

struct PristineSource {
  std::string id;
  std::filesystem::path path;
};

/// Image files in `dir` (PNG/PGM/PPM) sorted by name. When `split` is set (a
/// comma-separated list) the directory must hold a corpus.tsv whose "split"
/// column selects the tiles.
inline std::vector<PristineSource> list_pristine(const std::filesystem::path& dir, const std::string& split = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("pristine directory not found: " + dir.string());
  std::vector<PristineSource> out;
  std::set<std::string> wanted;
  if (!split.empty()) {
    std::ifstream f(dir / "corpus.tsv");
    if (!f) throw IoError("split '" + split + "' requested but " + (dir / "corpus.tsv").string() + " is missing");
    std::set<std::string> splits;
    {
      std::stringstream ss(split);
      std::string s;
      while (std::getline(ss, s, ','))
        if (!s.empty()) splits.insert(s);
    }
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string c;
      while (std::getline(ss, c, '\t')) cols.push_back(c);
      if (cols.size() >= 5 && splits.count(cols[4])) wanted.insert(cols[0]);
    }
    if (wanted.empty()) throw DomainError("split '" + split + "' selects no images");
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = io_detail::lower_ext(e.path());
    if (ext != ".png" && ext != ".pgm" && ext != ".ppm") continue;
    const std::string id = e.path().stem().string();
    if (!split.empty() && !wanted.count(id)) continue;
    out.push_back({id, e.path()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].id == out[i - 1].id) throw DomainError("duplicate pristine id " + out[i].id);
  return out;
}

/// Per-image seed so that adding or removing other images leaves this one unchanged.
inline Seed pristine_seed(Seed seed, const std::string& id) { return mix64(seed, fnv1a64(id)); }

/// The luminance plane stored for a pristine image (rounded to 8 bits so the
/// saved file and the in-memory reference agree).
inline ImagePlane load_pristine(const std::filesystem::path& path) {
  return quantize8(to_luminance(load_image(path)));
}

/// Generates PR, DR and FD images under out_dir/{pr,dr,fd} and returns the
/// unlabelled manifest. Output depends only on the inputs and the seed.
inline DatasetManifest build_database(const std::vector<PristineSource>& pristine,
                                      const std::filesystem::path& out_dir, Seed seed, const ScaleSpec& scale) {
  namespace fs = std::filesystem;
  if (pristine.empty()) throw DomainError("build_database: no pristine images");
  scale.validate();
  for (const char* sub : {"pr", "dr", "fd"}) {
    std::error_code ec;
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }

  std::vector<ImagePlane> planes;
  for (const auto& p : pristine) {
    auto img = load_pristine(p.path);
    if (img.width() < 192 || img.height() < 192)
      throw DomainError("pristine image " + p.id + " is smaller than 192x192");
    planes.push_back(std::move(img));
  }

  DatasetManifest m;
  m.root = out_dir;
  for (std::size_t i = 0; i < pristine.size(); ++i) {
    ManifestRecord r;
    r.id = pristine[i].id;
    r.role = Role::PR;
    r.path = "pr/" + r.id + ".png";
    r.pristine_id = r.id;
    r.seed = pristine_seed(seed, r.id);
    m.records.push_back(r);
  }
  struct Job {
    std::size_t p;
    DistortionType type;
    int level1;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < pristine.size(); ++p)
    for (auto t : kStage1Types)
      for (int l1 : scale.levels1) jobs.push_back({p, t, l1});
  for (const auto& j : jobs) {
    ManifestRecord r;
    r.pristine_id = pristine[j.p].id;
    r.id = dr_record_id(r.pristine_id, j.type, j.level1);
    r.role = Role::DR;
    r.path = "dr/" + r.id + ".png";
    r.combo = std::string(to_string(j.type));
    r.level1 = j.level1;
    r.seed = pristine_seed(seed, r.pristine_id);
    m.records.push_back(r);
  }
  for (std::size_t p = 0; p < pristine.size(); ++p)
    for (auto c : scale.combos)
      for (int l1 : scale.levels1)
        for (int l2 : scale.levels2) {
          ManifestRecord r;
          r.pristine_id = pristine[p].id;
          r.id = fd_record_id(r.pristine_id, c, l1, l2);
          r.role = Role::FD;
          r.path = "fd/" + r.id + ".png";
          r.combo = std::string(to_string(c));
          r.level1 = l1;
          r.level2 = l2;
          r.seed = pristine_seed(seed, r.pristine_id);
          m.records.push_back(r);
        }

  for (std::size_t p = 0; p < pristine.size(); ++p) save_plane(out_dir / "pr" / (pristine[p].id + ".png"), planes[p]);

  // One task per (pristine, stage-1 type, level1): the DR and every FD derived from it.
  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto& j = jobs[k];
    const std::string& pid = pristine[j.p].id;
    const Seed s = pristine_seed(seed, pid);
    const ImagePlane dr = run_stage1(planes[j.p], j.type, j.level1, s);
    save_plane(out_dir / "dr" / (dr_record_id(pid, j.type, j.level1) + ".png"), dr);
    for (auto c : scale.combos) {
      const auto [s1, s2] = combo_stages(c);
      if (s1 != j.type) continue;
      for (int l2 : scale.levels2) {
        const ImagePlane fd = run_stage2(dr, s2, j.level1, l2, s);
        save_plane(out_dir / "fd" / (fd_record_id(pid, c, j.level1, l2) + ".png"), fd);
      }
    }
  });
  m.reindex();
  return m;
}

/// label = 100 x FR(pristine, image), clamped to [0, 100], for every DR and FD record.
inline void annotate_benchmark(DatasetManifest& m, FrBackend backend) {
  std::map<std::string, std::size_t> pr_index;
  for (std::size_t i = 0; i < m.records.size(); ++i)
    if (m.records[i].role == Role::PR) pr_index[m.records[i].id] = i;
  std::map<std::string, ImagePlane> pr_planes;
  for (const auto& [id, i] : pr_index) pr_planes.emplace(id, load_plane(m.resolve(m.records[i])));
  parallel_for(m.records.size(), [&](std::size_t i) {
    auto& r = m.records[i];
    if (r.role == Role::PR) {
      r.label.reset();
      return;
    }
    const auto it = pr_planes.find(r.pristine_id);
    if (it == pr_planes.end()) throw DomainError("annotate_benchmark: " + r.id + " has no pristine record");
    const double v = 100.0 * fr_score(backend, it->second, load_plane(m.resolve(r)));
    r.label = std::clamp(v, 0.0, 100.0);
  });
}

}  // namespace driqa

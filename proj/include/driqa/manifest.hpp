#pragma once

// Record-per-image dataset index, stored as tab-separated text.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "driqa/distortions.hpp"
#include "driqa/errors.hpp"
#include "driqa/rng.hpp"

namespace driqa {

enum class Role { PR, DR, FD };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::PR: return "PR";
    case Role::DR: return "DR";
    case Role::FD: return "FD";
  }
  return "?";
}

struct ManifestRecord {
  std::string id;
  Role role = Role::PR;
  std::string path;  // relative to the manifest directory
  std::string pristine_id;
  std::string combo = "-";  // "-" for PR, stage-1 type for DR, combo name for FD
  int level1 = 0;
  int level2 = 0;
  Seed seed = 0;
  std::optional<double> label;

  std::optional<ComboType> combo_type() const {
    return role == Role::FD ? parse_combo(combo) : std::nullopt;
  }

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

inline std::string dr_record_id(const std::string& pristine, DistortionType t, int level1) {
  return pristine + "_" + std::string(to_string(t)) + "_" + std::to_string(level1);
}

inline std::string fd_record_id(const std::string& pristine, ComboType c, int level1, int level2) {
  return pristine + "_" + std::string(to_string(c)) + "_" + std::to_string(level1) + "_" +
         std::to_string(level2);
}

inline constexpr std::string_view kManifestHeader =
    "id\trole\tpath\tpristine_id\tcombo\tlevel1\tlevel2\tseed\tlabel";

struct DatasetManifest {
  std::filesystem::path root;  // directory the record paths are relative to
  std::vector<ManifestRecord> records;

  std::filesystem::path resolve(const ManifestRecord& r) const { return root / r.path; }

  /// Rebuilds the id lookup table; call after editing `records`.
  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < records.size(); ++i) index_.emplace(records[i].id, i);
  }

  const ManifestRecord* find(const std::string& id) const {
    if (index_.size() == records.size()) {
      const auto it = index_.find(id);
      return it == index_.end() ? nullptr : &records[it->second];
    }
    for (const auto& r : records)
      if (r.id == id) return &r;
    return nullptr;
  }

  std::set<std::string> pristine_ids() const {
    std::set<std::string> s;
    for (const auto& r : records) s.insert(r.pristine_id);
    return s;
  }

  /// The DR record an FD record was generated from.
  const ManifestRecord* dr_of(const ManifestRecord& fd) const {
    const auto c = fd.combo_type();
    if (!c) return nullptr;
    return find(dr_record_id(fd.pristine_id, combo_stages(*c).first, fd.level1));
  }

  const ManifestRecord* pr_of(const ManifestRecord& r) const { return find(r.pristine_id); }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

inline std::string format_label(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

inline void write_manifest(std::ostream& os, const DatasetManifest& m) {
  os << kManifestHeader << '\n';
  for (const auto& r : m.records)
    os << r.id << '\t' << to_string(r.role) << '\t' << r.path << '\t' << r.pristine_id << '\t' << r.combo
       << '\t' << r.level1 << '\t' << r.level2 << '\t' << r.seed << '\t' << format_label(r.label) << '\n';
}

inline void save_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  write_manifest(f, m);
  if (!f) throw IoError("write failed: " + path.string());
}

/// Reads a manifest; record paths resolve against the file's directory.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read manifest " + path.string());
  DatasetManifest m;
  m.root = path.parent_path();
  std::string line;
  if (!std::getline(f, line) || line != kManifestHeader)
    throw FormatError(path.string() + ": missing manifest header");
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, '\t')) cols.push_back(c);
    if (cols.size() != 9)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 9 fields");
    ManifestRecord r;
    r.id = cols[0];
    if (cols[1] == "PR") r.role = Role::PR;
    else if (cols[1] == "DR") r.role = Role::DR;
    else if (cols[1] == "FD") r.role = Role::FD;
    else throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad role");
    r.path = cols[2];
    r.pristine_id = cols[3];
    r.combo = cols[4];
    try {
      r.level1 = std::stoi(cols[5]);
      r.level2 = std::stoi(cols[6]);
      r.seed = std::stoull(cols[7]);
      if (cols[8] != "-") r.label = std::stod(cols[8]);
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
    m.records.push_back(std::move(r));
  }
  m.reindex();
  return m;
}

/// Every FD resolves to exactly one DR and every DR/FD to exactly one PR.
inline void check_integrity(const DatasetManifest& m) {
  std::map<std::string, int> ids;
  for (const auto& r : m.records) ++ids[r.id];
  for (const auto& [id, n] : ids)
    if (n != 1) throw DomainError("manifest: duplicate id " + id);
  for (const auto& r : m.records) {
    if (r.role == Role::PR) continue;
    const auto* pr = m.pr_of(r);
    if (!pr || pr->role != Role::PR) throw DomainError("manifest: " + r.id + " has no pristine record");
    if (r.role == Role::FD) {
      if (!r.combo_type() || !is_generating(*r.combo_type()))
        throw DomainError("manifest: " + r.id + " has an unknown combo");
      const auto* dr = m.dr_of(r);
      if (!dr || dr->role != Role::DR || dr->seed != r.seed)
        throw DomainError("manifest: " + r.id + " does not resolve to a DR record");
    }
  }
}

}  // namespace driqa

#pragma once

// A fitted DR IQA model bundled with its provenance, and its text parameter file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "driqa/arch.hpp"
#include "driqa/errors.hpp"
#include "driqa/logistic.hpp"
#include "driqa/models.hpp"
#include "driqa/svr.hpp"

namespace driqa {

enum class ModelKind { Model1 = 1, Model2 = 2, Model3 = 3 };

struct FitMeta {
  std::size_t train_samples = 0;
  std::uint64_t train_hash = 0;
  std::size_t val_samples = 0;
  double val_plcc = 0.0;
  double val_srcc = 0.0;
};

struct FittedModel {
  ModelKind kind = ModelKind::Model1;
  ComboType combo = ComboType::AllData;
  BackendPair pair;
  ArchCode arch = kScenario1;
  std::optional<LogisticParams> nr_map;  // NR(DR) -> FR scale, Scenario 2 only
  Model1Params m1;
  Model2Params m2;
  SvrModel m3;
  FitMeta meta;

  /// The DR-side model input: the FR AS_DR as given, or the mapped NR score.
  double dr_input(double raw) const { return nr_map ? (*nr_map)(raw) : raw; }

  double predict(double raw_dr, double rs_fd) const {
    const double a = dr_input(raw_dr);
    switch (kind) {
      case ModelKind::Model1: return model1_predict(m1, a, rs_fd);
      case ModelKind::Model2: return model2_predict(m2, a, rs_fd);
      case ModelKind::Model3:
        check_finite(a, rs_fd, "svr_predict");
        return m3.predict({a, rs_fd});
    }
    return 0.0;
  }
};

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Line format: "key value..." with a leading "driqa-params 1" header.
inline std::string format_fitted_model(const FittedModel& m) {
  std::ostringstream os;
  os << "driqa-params 1\n";
  os << "kind model" << static_cast<int>(m.kind) << '\n';
  os << "combo " << short_name(m.combo) << '\n';
  os << "backend " << m.pair.str() << '\n';
  os << "arch " << m.arch.str() << '\n';
  os << "train_samples " << m.meta.train_samples << '\n';
  os << "train_hash " << hex64(m.meta.train_hash) << '\n';
  os << "val_samples " << m.meta.val_samples << '\n';
  os << "val_plcc " << fmt17(m.meta.val_plcc) << '\n';
  os << "val_srcc " << fmt17(m.meta.val_srcc) << '\n';
  if (m.nr_map) {
    os << "nr_map";
    for (double b : m.nr_map->as_vector()) os << ' ' << fmt17(b);
    os << '\n';
  }
  switch (m.kind) {
    case ModelKind::Model1:
      os << "p1 " << fmt17(m.m1.p1) << "\np2 " << fmt17(m.m1.p2) << '\n';
      break;
    case ModelKind::Model2:
      os << "a " << fmt17(m.m2.a) << "\nb " << fmt17(m.m2.b) << "\nc " << fmt17(m.m2.c) << "\nd "
         << fmt17(m.m2.d) << "\ne " << fmt17(m.m2.e) << "\nf " << fmt17(m.m2.f) << '\n';
      break;
    case ModelKind::Model3: {
      const auto& s = m.m3;
      os << "svr " << fmt17(s.hyper.c) << ' ' << fmt17(s.hyper.nu) << ' ' << fmt17(s.hyper.gamma) << ' '
         << fmt17(s.hyper.tolerance) << '\n';
      os << "scale " << fmt17(s.lo[0]) << ' ' << fmt17(s.lo[1]) << ' ' << fmt17(s.scale[0]) << ' '
         << fmt17(s.scale[1]) << '\n';
      os << "bias " << fmt17(s.bias) << '\n';
      os << "support " << s.support.size() << '\n';
      for (std::size_t i = 0; i < s.support.size(); ++i)
        os << "sv " << fmt17(s.support[i][0]) << ' ' << fmt17(s.support[i][1]) << ' ' << fmt17(s.coef[i])
           << '\n';
      break;
    }
  }
  return os.str();
}

inline void save_fitted_model(const std::filesystem::path& path, const FittedModel& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << format_fitted_model(m);
  if (!f) throw IoError("write failed: " + path.string());
}

inline FittedModel load_fitted_model(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read parameter file " + path.string());
  const std::string where = path.string();
  auto bad = [&](const std::string& what) { return FormatError(where + ": " + what); };

  std::string line;
  if (!std::getline(f, line) || line != "driqa-params 1") throw bad("missing header");
  std::map<std::string, std::vector<std::string>> kv;
  std::vector<std::vector<double>> svs;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key, tok;
    ls >> key;
    std::vector<std::string> vals;
    while (ls >> tok) vals.push_back(tok);
    if (key == "sv") {
      if (vals.size() != 3) throw bad("malformed support vector");
      svs.push_back({std::stod(vals[0]), std::stod(vals[1]), std::stod(vals[2])});
    } else {
      kv[key] = std::move(vals);
    }
  }
  auto get = [&](const std::string& k, std::size_t n = 1) -> const std::vector<std::string>& {
    const auto it = kv.find(k);
    if (it == kv.end() || it->second.size() != n) throw bad("missing or malformed '" + k + "'");
    return it->second;
  };
  auto num = [&](const std::string& k, std::size_t i = 0, std::size_t n = 1) {
    try {
      return std::stod(get(k, n)[i]);
    } catch (const std::logic_error&) {
      throw bad("bad number for '" + k + "'");
    }
  };

  FittedModel m;
  const auto& kind = get("kind")[0];
  if (kind == "model1") m.kind = ModelKind::Model1;
  else if (kind == "model2") m.kind = ModelKind::Model2;
  else if (kind == "model3") m.kind = ModelKind::Model3;
  else throw bad("unknown model kind " + kind);
  const auto combo = parse_combo(get("combo")[0]);
  if (!combo) throw bad("unknown combo");
  m.combo = *combo;
  const auto pair = BackendPair::parse(get("backend")[0]);
  if (!pair) throw bad("unknown backend pair");
  m.pair = *pair;
  const auto arch = ArchCode::parse(get("arch")[0]);
  if (!arch) throw bad("bad architecture code");
  m.arch = *arch;
  m.meta.train_samples = static_cast<std::size_t>(num("train_samples"));
  m.meta.train_hash = std::stoull(get("train_hash")[0], nullptr, 16);
  m.meta.val_samples = static_cast<std::size_t>(num("val_samples"));
  m.meta.val_plcc = num("val_plcc");
  m.meta.val_srcc = num("val_srcc");
  if (kv.count("nr_map")) {
    std::vector<double> b;
    for (std::size_t i = 0; i < 5; ++i) b.push_back(num("nr_map", i, 5));
    m.nr_map = LogisticParams::from_vector(b);
  }
  m.m1.combo = m.m2.combo = m.combo;
  m.m1.pair = m.m2.pair = m.pair;
  switch (m.kind) {
    case ModelKind::Model1:
      m.m1.p1 = num("p1");
      m.m1.p2 = num("p2");
      break;
    case ModelKind::Model2:
      m.m2.a = num("a");
      m.m2.b = num("b");
      m.m2.c = num("c");
      m.m2.d = num("d");
      m.m2.e = num("e");
      m.m2.f = num("f");
      break;
    case ModelKind::Model3: {
      auto& s = m.m3;
      s.hyper = {num("svr", 0, 4), num("svr", 1, 4), num("svr", 2, 4), num("svr", 3, 4)};
      s.lo = {num("scale", 0, 4), num("scale", 1, 4)};
      s.scale = {num("scale", 2, 4), num("scale", 3, 4)};
      s.bias = num("bias");
      if (static_cast<std::size_t>(num("support")) != svs.size()) throw bad("support vector count mismatch");
      for (const auto& v : svs) {
        s.support.push_back({v[0], v[1]});
        s.coef.push_back(v[2]);
      }
      break;
    }
  }
  return m;
}

}  // namespace driqa

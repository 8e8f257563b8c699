#pragma once

// Fitting DR IQA models on score tables and PLCC/SRCC evaluation against
// benchmark labels.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "driqa/arch.hpp"
#include "driqa/baselines.hpp"
#include "driqa/dr_model.hpp"
#include "driqa/rng.hpp"
#include "driqa/scores.hpp"
#include "driqa/stats.hpp"

namespace driqa {

struct FitRequest {
  ModelKind kind = ModelKind::Model1;
  ComboType group = ComboType::AllData;
  BackendPair pair;
  ArchCode arch = kScenario1;
};

/// The raw DR-side input of a row: the FR AS_DR, or NIQE(DR) for NR pairs.
inline double raw_dr_input(const ScoreRow& r, const BackendPair& p) {
  return p.nr ? r.niqe_dr : r.as_dr_of(p.fr);
}

/// Logistic map from NIQE(DR) onto AS_DR of `target`, fitted once per DR image.
inline LogisticParams fit_nr_map(const std::vector<ScoreRow>& rows, FrBackend target) {
  std::map<std::string, std::pair<double, double>> per_dr;
  for (const auto& r : rows) per_dr.try_emplace(r.dr_id, r.niqe_dr, r.as_dr_of(target));
  std::vector<double> n, f;
  for (const auto& [id, v] : per_dr) {
    if (!std::isfinite(v.first) || !std::isfinite(v.second))
      throw DomainError("fit_nr_map: missing NR or FR score for " + id);
    n.push_back(v.first);
    f.push_back(v.second);
  }
  return fit_logistic(n, f).params;
}

inline std::uint64_t training_hash(const std::vector<ScoreRow>& rows, const BackendPair& pair) {
  std::uint64_t h = fnv1a64(pair.str());
  char buf[200];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s %.17g %.17g %.17g %.17g\n", r.fd_id.c_str(), raw_dr_input(r, pair),
                  r.rs_fd_of(pair.fr), r.as_fd_of(pair.fr), r.label);
    h = fnv1a64(buf, h);
  }
  return h;
}

/// Checks that an architecture code and backend pair describe the same inputs.
inline void check_arch_pair(ArchCode arch, const BackendPair& pair) {
  if (classify_arch(arch) == ArchType::Invalid) throw DomainError("invalid architecture code " + arch.str());
  if (arch == kScenario1 && !pair.nr) return;
  if (arch == kScenario2 && pair.nr) return;
  throw Unsupported("architecture " + arch.str() + " with backend pair " + pair.str() +
                    " is not supported (use 100100 with an FR pair or 001100 with an NR pair)");
}

inline std::vector<FusionSample> fusion_samples(const FittedModel& m, const std::vector<ScoreRow>& rows) {
  std::vector<FusionSample> out;
  for (const auto& r : rows)
    out.push_back({m.dr_input(raw_dr_input(r, m.pair)), r.rs_fd_of(m.pair.fr), r.as_fd_of(m.pair.fr)});
  return out;
}

/// Fits one model on the training rows of a grouping; the validation rows
/// supply the recorded PLCC/SRCC (and drive the grid search for Model 3).
/// Models 1 and 2 target the backend AS_FD; Model 3 targets label / 100.
inline FittedModel fit_dr_model(const std::vector<ScoreRow>& train_all, const std::vector<ScoreRow>& val_all,
                                const FitRequest& req) {
  check_arch_pair(req.arch, req.pair);
  const auto train = rows_in_group(train_all, req.group);
  const auto val = rows_in_group(val_all, req.group);
  if (train.empty()) throw DegenerateInput("no training rows for " + std::string(to_string(req.group)));
  if (val.size() < 4) throw DegenerateInput("too few validation rows for " + std::string(to_string(req.group)));

  FittedModel m;
  m.kind = req.kind;
  m.combo = req.group;
  m.pair = req.pair;
  m.arch = req.arch;
  m.m1.combo = m.m2.combo = req.group;
  m.m1.pair = m.m2.pair = req.pair;
  if (req.pair.nr) m.nr_map = fit_nr_map(train, req.pair.fr);

  switch (req.kind) {
    case ModelKind::Model1: {
      std::map<std::tuple<std::string, int, int>, CurveGroup> groups;
      for (const auto& r : train) {
        auto& g = groups[{r.pristine_id, static_cast<int>(r.combo), r.level1}];
        g.as_dr = m.dr_input(raw_dr_input(r, req.pair));
        g.rs_fd.push_back(r.rs_fd_of(req.pair.fr));
        g.as_fd.push_back(r.as_fd_of(req.pair.fr));
      }
      std::vector<CurveGroup> gv;
      for (auto& [k, g] : groups) gv.push_back(std::move(g));
      const auto fit = fit_model1(gv);
      m.m1.p1 = fit.params.p1;
      m.m1.p2 = fit.params.p2;
      break;
    }
    case ModelKind::Model2: {
      const auto p = fit_model2(fusion_samples(m, train));
      m.m2.a = p.a;
      m.m2.b = p.b;
      m.m2.c = p.c;
      m.m2.d = p.d;
      m.m2.e = p.e;
      m.m2.f = p.f;
      break;
    }
    case ModelKind::Model3: {
      auto svr_set = [&](const std::vector<ScoreRow>& rows) {
        std::vector<SvrSample> s;
        for (const auto& r : rows) {
          if (!std::isfinite(r.label)) throw DomainError("Model 3 needs benchmark labels (" + r.fd_id + ")");
          s.push_back({{m.dr_input(raw_dr_input(r, req.pair)), r.rs_fd_of(req.pair.fr)}, r.label / 100.0, 1.0});
        }
        return s;
      };
      if (train.size() < 20) throw DegenerateInput("Model 3 needs at least 20 training samples");
      m.m3 = svr_grid_search(svr_set(train), svr_set(val)).model;
      break;
    }
  }

  m.meta.train_samples = train.size();
  m.meta.train_hash = training_hash(train, req.pair);
  m.meta.val_samples = val.size();
  std::vector<double> pred, tgt;
  for (const auto& r : val) {
    pred.push_back(m.predict(raw_dr_input(r, req.pair), r.rs_fd_of(req.pair.fr)));
    tgt.push_back(r.label);
  }
  try {
    m.meta.val_plcc = plcc(pred, tgt);
    m.meta.val_srcc = srcc(pred, tgt);
  } catch (const DegenerateInput&) {
    m.meta.val_plcc = m.meta.val_srcc = kNaN;
  }
  return m;
}

/// A scored method: predict(row, grouping) returns NaN when the method has no
/// model for that grouping.
struct Method {
  std::string name;
  std::function<double(const ScoreRow&, ComboType)> predict;
  bool lower_is_better = false;  // correlations are reported for the negated score
};

inline Method model_method(std::string name, std::map<ComboType, FittedModel> per_group) {
  return {std::move(name), [models = std::move(per_group)](const ScoreRow& r, ComboType g) {
            const auto it = models.find(g);
            if (it == models.end()) return kNaN;
            const auto& m = it->second;
            return m.predict(raw_dr_input(r, m.pair), r.rs_fd_of(m.pair.fr));
          }};
}

inline Method baseline1_method(FrBackend b) {
  return {"Baseline-1", [b](const ScoreRow& r, ComboType) { return r.rs_fd_of(b); }};
}

inline Method baseline2_method() {
  return {"Baseline-2", [](const ScoreRow& r, ComboType) { return r.niqe_fd; }, true};
}

inline Method baseline3_method(const LogisticParams& nr_to_msssim) {
  return {"Baseline-3", [nr_to_msssim](const ScoreRow& r, ComboType) {
            return baseline3_combine(nr_to_msssim(r.niqe_dr), r.rs_fd_of(FrBackend::MsSsim));
          }};
}

struct EvalCell {
  std::string method;
  ComboType group = ComboType::AllData;
  std::size_t n = 0;
  double plcc = kNaN;
  double srcc = kNaN;
};

/// Groupings with data: generating combos present in the rows, NBJ-JPG when
/// any of its members is present, and AllData.
inline std::vector<ComboType> groupings_present(const std::vector<ScoreRow>& rows) {
  std::set<ComboType> have;
  for (const auto& r : rows) have.insert(r.combo);
  std::vector<ComboType> out;
  for (auto g : kAllGroupings) {
    bool any = false;
    for (auto c : have) any = any || combo_in_group(c, g);
    if (any) out.push_back(g);
  }
  return out;
}

inline std::vector<EvalCell> evaluate(const std::vector<ScoreRow>& rows, const std::vector<Method>& methods) {
  std::vector<EvalCell> out;
  for (const auto& meth : methods)
    for (auto g : groupings_present(rows)) {
      EvalCell cell{meth.name, g};
      std::vector<double> pred, tgt;
      bool missing = false;
      for (const auto& r : rows) {
        if (!combo_in_group(r.combo, g)) continue;
        const double p = meth.predict(r, g);
        if (!std::isfinite(p) || !std::isfinite(r.label)) {
          missing = true;
          break;
        }
        pred.push_back(meth.lower_is_better ? -p : p);
        tgt.push_back(r.label);
      }
      cell.n = pred.size();
      if (!missing) {
        try {
          cell.plcc = plcc(pred, tgt);
          cell.srcc = srcc(pred, tgt);
        } catch (const DegenerateInput&) {
        }
      }
      out.push_back(cell);
    }
  return out;
}

inline const EvalCell* find_cell(const std::vector<EvalCell>& cells, const std::string& method, ComboType g) {
  for (const auto& c : cells)
    if (c.method == method && c.group == g) return &c;
  return nullptr;
}

/// Two blocks (PLCC then SRCC): one row per method, one column per grouping.
inline void write_results_csv(std::ostream& os, const std::vector<EvalCell>& cells) {
  std::vector<std::string> methods;
  std::vector<ComboType> groups;
  for (const auto& c : cells) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
    if (std::find(groups.begin(), groups.end(), c.group) == groups.end()) groups.push_back(c.group);
  }
  std::sort(groups.begin(), groups.end());
  os << "criterion,method";
  for (auto g : groups) os << ',' << short_name(g);
  os << '\n';
  for (const char* crit : {"PLCC", "SRCC"})
    for (const auto& m : methods) {
      os << crit << ',' << m;
      for (auto g : groups) {
        const auto* c = find_cell(cells, m, g);
        const double v = !c ? kNaN : (crit[0] == 'P' ? c->plcc : c->srcc);
        if (std::isfinite(v)) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.4f", v);
          os << ',' << buf;
        } else {
          os << ",NA";
        }
      }
      os << '\n';
    }
}

}  // namespace driqa

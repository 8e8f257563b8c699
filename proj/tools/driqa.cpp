// driqa: generate DR IQA databases, fit and apply fusion models, evaluate.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "driqa/arch.hpp"
#include "driqa/behavior.hpp"
#include "driqa/database.hpp"
#include "driqa/dr_model.hpp"
#include "driqa/evaluate.hpp"
#include "driqa/image_io.hpp"
#include "driqa/manifest.hpp"
#include "driqa/niqe.hpp"
#include "driqa/version.hpp"

namespace fs = std::filesystem;
using namespace driqa;

namespace {

// Thrown for command-line validation failures (exit code 2).
struct UsageError : Error {
  using Error::Error;
};

struct Provenance {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, content hash

  void add_input(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    inputs.emplace_back(p.string(), hex64(fnv1a64(ss.str())));
  }

  void write(const fs::path& out_dir) const {
    std::ofstream f(out_dir / "provenance.txt", std::ios::binary);
    if (!f) throw IoError("cannot write provenance in " + out_dir.string());
    f << "driqa " << kVersion << '\n' << "command " << command << '\n';
    for (const auto& [k, v] : config) f << "config " << k << ' ' << v << '\n';
    for (const auto& [p, h] : inputs) f << "input " << h << ' ' << p << '\n';
  }
};

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create " + p.string() + ": " + ec.message());
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  f << s;
  if (!f) throw IoError("write failed: " + p.string());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_levels(const std::string& s, int hi, const char* flag) {
  if (s.empty() || s == "all") {
    std::vector<int> v(static_cast<std::size_t>(hi));
    for (int i = 0; i < hi; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    return v;
  }
  std::vector<int> v;
  for (const auto& tok : split_list(s)) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw UsageError(std::string(flag) + ": '" + tok + "' is not a level number");
    }
  }
  return v;
}

// `generating_only` restricts to the five image-producing combos.
std::vector<ComboType> parse_combos(const std::string& s, bool generating_only) {
  std::vector<ComboType> out;
  if (s.empty() || s == "all") {
    for (auto c : kAllGroupings)
      if (!generating_only || is_generating(c)) out.push_back(c);
    return out;
  }
  for (const auto& tok : split_list(s)) {
    const auto c = parse_combo(tok);
    if (!c) throw UsageError("unknown combination '" + tok + "'");
    if (generating_only && !is_generating(*c))
      throw UsageError("'" + tok + "' is an aggregation label, not a generating combination");
    if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
  }
  return out;
}

FrBackend parse_backend(const std::string& s) {
  const auto b = parse_fr_backend(s);
  if (!b) throw UsageError("unknown FR backend '" + s + "' (expected ssim or msssim)");
  return *b;
}

NrBackend parse_nr(const std::string& s) {
  const auto b = parse_nr_backend(s);
  if (!b) throw UsageError("unknown NR backend '" + s + "' (expected niqe)");
  if (*b != NrBackend::Niqe) throw Unsupported("NR backend '" + s + "' is not available; use niqe");
  return *b;
}

ArchCode parse_arch(const std::string& s) {
  const auto a = ArchCode::parse(s);
  if (!a) throw UsageError("architecture code must be six 0/1 digits, got '" + s + "'");
  return *a;
}

std::string file_tag(const FittedModel& m) {
  std::string pair = m.pair.str();
  return "model" + std::to_string(static_cast<int>(m.kind)) + "_" + std::string(short_name(m.combo)) + "_" + pair;
}

NiqeModel require_niqe(const std::string& path, const std::string& why) {
  if (path.empty()) throw UsageError(why + " needs a NIQE model: pass --niqe-model FILE (train one with 'driqa train-niqe')");
  if (!fs::exists(path)) throw UsageError("NIQE model file not found: " + path);
  return load_niqe_model(path);
}

DatasetManifest require_manifest(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  fs::path p(path);
  if (fs::is_directory(p)) p /= "manifest.tsv";
  auto m = load_manifest(p);
  check_integrity(m);
  return m;
}

fs::path manifest_path(const std::string& path) {
  fs::path p(path);
  return fs::is_directory(p) ? p / "manifest.tsv" : p;
}

void require_labels(const DatasetManifest& m, const char* flag) {
  for (const auto& r : m.records)
    if (r.role == Role::FD && !r.label)
      throw UsageError(std::string(flag) + " manifest has unlabelled FD records");
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  std::string pristine, split, out, levels1, levels2, combos, backend = "msssim";
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateOpts& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  const auto sources = list_pristine(o.pristine, o.split);
  if (sources.empty()) throw UsageError("no PNG/PGM/PPM images in " + o.pristine);
  ScaleSpec scale;
  scale.levels1 = parse_levels(o.levels1, kStage1Levels, "--levels1");
  scale.levels2 = parse_levels(o.levels2, kStage2Levels, "--levels2");
  scale.combos = parse_combos(o.combos, true);
  const FrBackend backend = parse_backend(o.backend);
  scale.validate();

  ensure_dir(o.out);
  auto m = build_database(sources, o.out, o.seed, scale);
  annotate_benchmark(m, backend);
  save_manifest(fs::path(o.out) / "manifest.tsv", m);

  Provenance prov{"generate", {}, {}};
  prov.config = {{"pristine", o.pristine}, {"split", o.split.empty() ? "-" : o.split},
                 {"seed", std::to_string(o.seed)}, {"levels1", o.levels1.empty() ? "all" : o.levels1},
                 {"levels2", o.levels2.empty() ? "all" : o.levels2}, {"combos", o.combos.empty() ? "all" : o.combos},
                 {"backend", std::string(to_string(backend))}};
  for (const auto& s : sources) prov.add_input(s.path);
  prov.write(o.out);

  const auto counts = expected_counts(sources.size(), scale);
  std::cout << "pristine " << sources.size() << "\nDR per type " << counts.dr_per_type << "\nFD per combo "
            << counts.fd_per_combo << "\ntotal distorted " << counts.total_distorted << '\n';
  return 0;
}

// ---------------------------------------------------------------- train-niqe

struct TrainNiqeOpts {
  std::string pristine, split, out;
};

int cmd_train_niqe(const TrainNiqeOpts& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  const auto sources = list_pristine(o.pristine, o.split);
  std::vector<ImagePlane> corpus;
  for (const auto& s : sources) corpus.push_back(load_pristine(s.path));
  const auto model = train_niqe(corpus);
  const fs::path out(o.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  save_niqe_model(out, model);
  Provenance prov{"train-niqe", {{"pristine", o.pristine}, {"split", o.split.empty() ? "-" : o.split}}, {}};
  for (const auto& s : sources) prov.add_input(s.path);
  prov.write(out.has_parent_path() ? out.parent_path() : fs::path("."));
  std::cout << "trained on " << corpus.size() << " images -> " << o.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- ladders

int cmd_ladders(const std::string& out) {
  if (out.empty() || out == "-") {
    write_ladder_table(std::cout);
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot write " + out);
  write_ladder_table(f);
  return 0;
}

// ---------------------------------------------------------------- fit

struct FitOpts {
  std::string train, val, out, model = "1", combos, arch = "100100", backend = "ssim", nr = "niqe", niqe_model;
};

BackendPair pair_for(ArchCode arch, FrBackend fr, const std::string& nr) {
  if (classify_arch(arch) == ArchType::Invalid) throw UsageError("invalid architecture " + arch.str());
  if (arch == kScenario1) return {std::nullopt, fr};
  if (arch == kScenario2) return {parse_nr(nr), fr};
  throw Unsupported("architecture " + arch.str() + " has no fitted model (supported: 100100, 001100)");
}

int cmd_fit(const FitOpts& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  const auto train = require_manifest(o.train, "--train");
  const auto val = require_manifest(o.val, "--val");
  require_labels(val, "--val");
  for (const auto& id : train.pristine_ids())
    if (val.pristine_ids().count(id))
      throw UsageError("training and validation manifests share pristine image '" + id + "'");

  const ArchCode arch = parse_arch(o.arch);
  const BackendPair pair = pair_for(arch, parse_backend(o.backend), o.nr);
  std::vector<ModelKind> kinds;
  for (const auto& tok : split_list(o.model == "all" ? std::string("1,2,3") : o.model)) {
    if (tok == "1") kinds.push_back(ModelKind::Model1);
    else if (tok == "2") kinds.push_back(ModelKind::Model2);
    else if (tok == "3") kinds.push_back(ModelKind::Model3);
    else throw UsageError("--model expects 1, 2, 3 or all");
  }

  std::optional<NiqeModel> niqe;
  if (pair.nr) niqe = require_niqe(o.niqe_model, "architecture " + arch.str());
  ScoreOptions so;
  so.ssim = pair.fr == FrBackend::Ssim;
  so.msssim = pair.fr == FrBackend::MsSsim;
  so.niqe = niqe ? &*niqe : nullptr;
  const auto train_rows = score_manifest(train, so);
  const auto val_rows = score_manifest(val, so);

  std::vector<ComboType> groups;
  if (o.combos.empty() || o.combos == "all") groups = groupings_present(train_rows);
  else groups = parse_combos(o.combos, false);

  ensure_dir(o.out);
  std::ostringstream summary;
  summary << "model,combo,backend,arch,train_samples,val_samples,val_plcc,val_srcc,file\n";
  for (auto kind : kinds)
    for (auto g : groups) {
      const auto m = fit_dr_model(train_rows, val_rows, {kind, g, pair, arch});
      const std::string file = file_tag(m) + ".params";
      save_fitted_model(fs::path(o.out) / file, m);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4f,%.4f", m.meta.val_plcc, m.meta.val_srcc);
      summary << "model" << static_cast<int>(kind) << ',' << short_name(g) << ',' << pair.str() << ',' << arch.str()
              << ',' << m.meta.train_samples << ',' << m.meta.val_samples << ',' << buf << ',' << file << '\n';
    }
  write_text(fs::path(o.out) / "fit_summary.csv", summary.str());
  std::cout << summary.str();

  Provenance prov{"fit", {}, {}};
  prov.config = {{"model", o.model}, {"combos", o.combos.empty() ? "all" : o.combos}, {"arch", arch.str()},
                 {"backend", pair.str()}};
  prov.add_input(manifest_path(o.train));
  prov.add_input(manifest_path(o.val));
  if (niqe) prov.add_input(o.niqe_model);
  prov.write(o.out);
  return 0;
}

// ---------------------------------------------------------------- score

struct ScoreOpts {
  std::string pr, dr, fd, arch, params, niqe_model, backend = "ssim", out;
};

int cmd_score(const ScoreOpts& o) {
  if (o.dr.empty() || o.fd.empty()) throw UsageError("--dr and --fd are required");
  std::optional<FittedModel> model;
  if (!o.params.empty()) model = load_fitted_model(o.params);
  ArchCode arch = model ? model->arch : kScenario1;
  if (!o.arch.empty()) arch = parse_arch(o.arch);
  const ArchType type = classify_arch(arch);
  if (type == ArchType::Invalid)
    throw UsageError("invalid architecture " + arch.str() + ": the DR or FD side is inaccessible");
  if (model && model->arch != arch)
    throw UsageError("parameter file was fitted for architecture " + model->arch.str() + ", not " + arch.str());

  const ImagePlane dr = load_plane(o.dr);
  const ImagePlane fd = load_plane(o.fd);
  std::optional<ImagePlane> pr;
  if (!o.pr.empty()) pr = load_plane(o.pr);
  const FrBackend fr = model ? model->pair.fr : parse_backend(o.backend);

  std::ostringstream os;
  os << "arch " << arch.str() << " (" << to_string(type) << ")\n";
  const double rs = fr_score(fr, dr, fd);
  os << "rs_fd " << fmt17(rs) << '\n';
  if (arch == kScenario1 || arch == kScenario2) {
    if (!model) throw UsageError("architecture " + arch.str() + " needs --params (a fitted model file)");
    double raw = 0.0;
    if (arch == kScenario1) {
      if (!pr) throw UsageError("architecture 100100 needs the pristine image: pass --pr");
      raw = fr_score(fr, *pr, dr);
      os << "as_dr " << fmt17(raw) << '\n';
    } else {
      const auto niqe = require_niqe(o.niqe_model, "architecture 001100");
      raw = niqe_score(dr, niqe);
      os << "nr_dr " << fmt17(raw) << '\n' << "mapped_as_dr " << fmt17(model->dr_input(raw)) << '\n';
    }
    os << "predicted_as_fd " << fmt17(model->predict(raw, rs)) << '\n';
  } else if (arch == ArchCode(0b000100)) {
    os << "predicted_as_fd " << fmt17(rs) << '\n';
  } else {
    throw Unsupported("architecture " + arch.str() + " is valid but has no implementation (supported: 100100, 001100, 000100)");
  }
  if (pr) os << "true_as_fd " << fmt17(fr_score(fr, *pr, fd)) << '\n';
  std::cout << os.str();

  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text(fs::path(o.out) / "score.txt", os.str());
    Provenance prov{"score", {{"arch", arch.str()}, {"backend", std::string(to_string(fr))}}, {}};
    for (const auto& p : {o.pr, o.dr, o.fd, o.params, o.niqe_model})
      if (!p.empty()) prov.add_input(p);
    prov.write(o.out);
  }
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOpts {
  std::string test, params, train, niqe_model, backend = "ssim", out;
  bool oracle = false;
};

int cmd_evaluate(const EvaluateOpts& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  const auto test = require_manifest(o.test, "--test");
  require_labels(test, "--test");
  const FrBackend b1 = parse_backend(o.backend);

  // Parameter files grouped into one method per (kind, backend pair).
  std::map<std::string, std::map<ComboType, FittedModel>> families;
  std::vector<fs::path> param_files;
  if (!o.params.empty()) {
    if (!fs::is_directory(o.params)) throw IoError("parameter directory not found: " + o.params);
    for (const auto& e : fs::directory_iterator(o.params))
      if (e.path().extension() == ".params") param_files.push_back(e.path());
    std::sort(param_files.begin(), param_files.end());
    for (const auto& p : param_files) {
      auto m = load_fitted_model(p);
      const std::string name = "Model" + std::to_string(static_cast<int>(m.kind)) + "[" + m.pair.str() + "]";
      families[name][m.combo] = std::move(m);
    }
  }
  bool need_niqe = false, need_msssim = b1 == FrBackend::MsSsim, need_ssim = b1 == FrBackend::Ssim;
  for (const auto& [name, fam] : families)
    for (const auto& [g, m] : fam) {
      need_niqe = need_niqe || m.pair.nr.has_value();
      (m.pair.fr == FrBackend::Ssim ? need_ssim : need_msssim) = true;
    }
  std::optional<NiqeModel> niqe;
  if (!o.niqe_model.empty()) niqe = require_niqe(o.niqe_model, "evaluate");
  else if (need_niqe) niqe = require_niqe("", "a Scenario-2 parameter file");
  if (niqe) need_msssim = true;

  ScoreOptions so;
  so.ssim = need_ssim;
  so.msssim = need_msssim;
  so.niqe = niqe ? &*niqe : nullptr;
  so.niqe_fd = niqe.has_value();
  const auto rows = score_manifest(test, so);
  for (const auto& [name, fam] : families)
    for (const auto& [g, m] : fam) {
      const auto present = groupings_present(rows);
      if (std::find(present.begin(), present.end(), g) == present.end())
        throw UsageError("parameter file for " + std::string(short_name(g)) + " has no matching test data");
    }

  std::vector<Method> methods;
  if (o.oracle) methods.push_back({"Oracle", [](const ScoreRow& r, ComboType) { return r.label; }});
  for (auto& [name, fam] : families) methods.push_back(model_method(name, fam));
  methods.push_back(baseline1_method(b1));
  if (niqe) {
    methods.push_back(baseline2_method());
    if (!o.train.empty()) {
      const auto train = require_manifest(o.train, "--train");
      for (const auto& id : train.pristine_ids())
        if (test.pristine_ids().count(id))
          throw UsageError("training and test manifests share pristine image '" + id + "'");
      ScoreOptions st;
      st.ssim = false;
      st.msssim = true;
      st.niqe = &*niqe;
      methods.push_back(baseline3_method(fit_nr_map(score_manifest(train, st), FrBackend::MsSsim)));
    }
  }

  const auto cells = evaluate(rows, methods);
  std::ostringstream csv;
  write_results_csv(csv, cells);
  ensure_dir(o.out);
  write_text(fs::path(o.out) / "results.csv", csv.str());
  std::cout << csv.str();

  Provenance prov{"evaluate", {{"backend", std::string(to_string(b1))}, {"oracle", o.oracle ? "1" : "0"}}, {}};
  prov.add_input(manifest_path(o.test));
  if (!o.train.empty()) prov.add_input(manifest_path(o.train));
  for (const auto& p : param_files) prov.add_input(p);
  if (!o.niqe_model.empty()) prov.add_input(o.niqe_model);
  prov.write(o.out);
  return 0;
}

// ---------------------------------------------------------------- behavior

struct BehaviorOpts {
  std::string manifest, combos, backend = "ssim", format = "csv", out;
};

int cmd_behavior(const BehaviorOpts& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  if (o.format != "csv" && o.format != "svg") throw UsageError("--format must be csv or svg");
  const auto m = require_manifest(o.manifest, "--test");
  const FrBackend backend = parse_backend(o.backend);
  ScoreOptions so;
  so.ssim = backend == FrBackend::Ssim;
  so.msssim = backend == FrBackend::MsSsim;
  const auto rows = score_manifest(m, so);

  std::vector<ComboType> combos;
  if (o.combos.empty() || o.combos == "all") {
    for (auto c : groupings_present(rows))
      if (is_generating(c)) combos.push_back(c);
  } else {
    combos = parse_combos(o.combos, true);
  }

  ensure_dir(o.out);
  std::ostringstream curves_csv, fits_csv, over_csv, summary;
  summary << "combo,curves,slope_r2,overshoot_points\n";
  bool first = true;
  for (auto c : combos) {
    const auto curves = extract_behavior(rows, c, backend);
    const auto over = detect_overshoot(curves);
    write_curve_csv(curves_csv, curves, first);
    write_curve_fit_csv(fits_csv, curves, first);
    write_overshoot_csv(over_csv, over, first);
    first = false;
    std::string r2 = "NA";
    try {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", slope_linearity(curves).r2);
      r2 = buf;
    } catch (const DegenerateInput&) {
    }
    summary << short_name(c) << ',' << curves.size() << ',' << r2 << ',' << over.points_for(c) << '\n';
    if (o.format == "svg") {
      std::map<std::string, std::vector<BehaviorCurve>> by_pristine;
      for (const auto& cv : curves) by_pristine[cv.pristine_id].push_back(cv);
      for (const auto& [pid, cs] : by_pristine) {
        std::ostringstream svg;
        write_behavior_svg(svg, cs, std::string(to_string(c)) + " / " + pid + " (" + std::string(to_string(backend)) + ")");
        write_text(fs::path(o.out) / ("behavior_" + std::string(short_name(c)) + "_" + pid + ".svg"), svg.str());
      }
    }
  }
  write_text(fs::path(o.out) / "curves.csv", curves_csv.str());
  write_text(fs::path(o.out) / "curve_fits.csv", fits_csv.str());
  write_text(fs::path(o.out) / "overshoot.csv", over_csv.str());
  write_text(fs::path(o.out) / "behavior_summary.csv", summary.str());
  std::cout << summary.str();

  Provenance prov{"behavior", {{"backend", std::string(to_string(backend))}, {"format", o.format}}, {}};
  prov.add_input(manifest_path(o.manifest));
  prov.write(o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degraded-reference image quality assessment toolkit"};
  app.set_version_flag("--version", std::string("driqa ") + kVersion);
  app.set_config("--config", "", "TOML/INI file mirroring the command-line flags (flags take precedence)");
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Build a two-stage distorted database with benchmark labels");
  g->add_option("--pristine", gen.pristine, "Directory of pristine images")->required();
  g->add_option("--split", gen.split, "Select tiles by the split column of corpus.tsv in the pristine directory");
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--levels1", gen.levels1, "Stage-1 levels, comma separated (default all 11)");
  g->add_option("--levels2", gen.levels2, "Stage-2 levels, comma separated (default all 17)");
  g->add_option("--combos,--combo", gen.combos, "Distortion combinations (default all five)");
  g->add_option("--backend", gen.backend, "FR backend used for labels: ssim or msssim");

  TrainNiqeOpts tn;
  auto* t = app.add_subcommand("train-niqe", "Fit a NIQE pristine model");
  t->add_option("--pristine", tn.pristine, "Directory of pristine images")->required();
  t->add_option("--split", tn.split, "Select tiles by the split column of corpus.tsv");
  t->add_option("--out", tn.out, "Model file to write");

  std::string ladder_out;
  auto* l = app.add_subcommand("ladders", "Print the distortion level table");
  l->add_option("--out", ladder_out, "Output file (default stdout)");

  FitOpts fit;
  auto* f = app.add_subcommand("fit", "Fit DR IQA models");
  f->add_option("--train", fit.train, "Training manifest (file or database directory)");
  f->add_option("--val", fit.val, "Validation manifest");
  f->add_option("--out", fit.out, "Directory for parameter files");
  f->add_option("--model", fit.model, "1, 2, 3, a comma list, or all");
  f->add_option("--combos,--combo", fit.combos, "Groupings to fit (default all present)");
  f->add_option("--arch", fit.arch, "Architecture code: 100100 or 001100");
  f->add_option("--backend", fit.backend, "FR backend: ssim or msssim");
  f->add_option("--nr", fit.nr, "NR backend for 001100: niqe");
  f->add_option("--niqe-model", fit.niqe_model, "NIQE model file");

  ScoreOpts sc;
  auto* s = app.add_subcommand("score", "Predict AS_FD for one (DR, FD) pair");
  s->add_option("--pr", sc.pr, "Pristine image (required for 100100; adds true AS_FD)");
  s->add_option("--dr", sc.dr, "Degraded reference image");
  s->add_option("--fd", sc.fd, "Final distorted image");
  s->add_option("--arch", sc.arch, "Architecture code (default from the parameter file)");
  s->add_option("--params", sc.params, "Parameter file from 'driqa fit'");
  s->add_option("--niqe-model", sc.niqe_model, "NIQE model file");
  s->add_option("--backend", sc.backend, "FR backend when no parameter file is given");
  s->add_option("--out", sc.out, "Optional output directory");

  EvaluateOpts ev;
  auto* e = app.add_subcommand("evaluate", "PLCC/SRCC of models and baselines on a test manifest");
  e->add_option("--test", ev.test, "Test manifest");
  e->add_option("--params", ev.params, "Directory of parameter files");
  e->add_option("--train", ev.train, "Training manifest (fits the Baseline-3 mapping)");
  e->add_option("--niqe-model", ev.niqe_model, "NIQE model file (enables Baselines 2 and 3)");
  e->add_option("--backend", ev.backend, "FR backend of Baseline-1");
  e->add_option("--out", ev.out, "Output directory");
  e->add_flag("--oracle", ev.oracle, "Add the labels themselves as a method");

  BehaviorOpts bh;
  auto* b = app.add_subcommand("behavior", "AS_FD vs RS_FD curves, slopes and overshoot");
  b->add_option("--test,--manifest", bh.manifest, "Manifest to analyse");
  b->add_option("--combos,--combo", bh.combos, "Combinations (default all present)");
  b->add_option("--backend", bh.backend, "FR backend: ssim or msssim");
  b->add_option("--format", bh.format, "csv, or svg to add plots");
  b->add_option("--out", bh.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*t) return cmd_train_niqe(tn);
    if (*l) return cmd_ladders(ladder_out);
    if (*f) return cmd_fit(fit);
    if (*s) return cmd_score(sc);
    if (*e) return cmd_evaluate(ev);
    if (*b) return cmd_behavior(bh);
  } catch (const IoError& err) {
    std::cerr << "driqa: " << err.what() << '\n';
    return 1;
  } catch (const FormatError& err) {
    std::cerr << "driqa: " << err.what() << '\n';
    return 1;
  } catch (const Error& err) {
    std::cerr << "driqa: " << err.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& err) {
    std::cerr << "driqa: " << err.what() << '\n';
    return 1;
  }
  return 2;
}

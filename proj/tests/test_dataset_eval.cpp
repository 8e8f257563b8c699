#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "driqa/behavior.hpp"
#include "driqa/database.hpp"
#include "driqa/evaluate.hpp"
#include "driqa/manifest.hpp"
#include "driqa/scores.hpp"
#include "driqa/stats.hpp"
#include "test_util.hpp"

using namespace driqa;
namespace fs = std::filesystem;

namespace {

ScaleSpec mini_scale() {
  ScaleSpec s = ScaleSpec::full();
  s.levels1 = {1, 4, 7, 10, 11};
  s.levels2 = {1, 5, 9, 13, 17};
  return s;
}

struct MiniDb {
  fs::path dir;
  DatasetManifest manifest;
  std::vector<ScoreRow> rows;
};

// Built once per test binary: test split, seed 7, 5x5 levels, every combo.
const MiniDb& mini_db() {
  static const MiniDb db = [] {
    MiniDb d;
    d.dir = testutil::temp_dir("mini_db");
    d.manifest = build_database(list_pristine(testutil::corpus_dir(), "test"), d.dir, 7, mini_scale());
    annotate_benchmark(d.manifest, FrBackend::MsSsim);
    save_manifest(d.dir / "manifest.tsv", d.manifest);
    d.rows = score_manifest(d.manifest, ScoreOptions{});
    return d;
  }();
  return db;
}

std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : v) {
      less += x < v[i];
      equal += x == v[i];
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

double oracle_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(Counts, FullScale) {
  const auto c = expected_counts(34, ScaleSpec::full());
  EXPECT_EQ(c.dr_per_type, 374u);
  EXPECT_EQ(c.fd_per_combo, 6358u);
  EXPECT_EQ(c.total_distorted, 32912u);
  const auto one = expected_counts(1, ScaleSpec::full());
  EXPECT_EQ(one.dr_per_type, 11u);
  EXPECT_EQ(one.fd_per_combo, 187u);
}

TEST(Counts, MiniScale) {
  const auto c = expected_counts(4, mini_scale());
  EXPECT_EQ(c.dr_per_type, 20u);
  EXPECT_EQ(c.fd_per_combo, 100u);
  EXPECT_EQ(c.total_distorted, 560u);
  ScaleSpec s = mini_scale();
  s.combos = {ComboType::NoiseJp2k};
  EXPECT_EQ(expected_counts(3, s).total_distorted, 3u * 3 * 5 + 3u * 25);
}

TEST(ScaleSpec, Validation) {
  ScaleSpec s = mini_scale();
  s.levels1.push_back(12);
  EXPECT_THROW(s.validate(), DomainError);
  s = mini_scale();
  s.levels2.push_back(5);
  EXPECT_THROW(s.validate(), DomainError);
  s = mini_scale();
  s.combos = {ComboType::AllData};
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(Database, MiniBuildMatchesCounts) {
  const auto& db = mini_db();
  std::size_t pr = 0, dr = 0, fd = 0;
  std::map<std::string, std::size_t> per;
  for (const auto& r : db.manifest.records) {
    pr += r.role == Role::PR;
    dr += r.role == Role::DR;
    fd += r.role == Role::FD;
    if (r.role != Role::PR) ++per[r.combo];
    EXPECT_TRUE(fs::exists(db.manifest.resolve(r))) << r.path;
  }
  EXPECT_EQ(pr, 4u);
  EXPECT_EQ(dr + fd, 560u);
  for (auto t : kStage1Types) EXPECT_EQ(per[std::string(to_string(t))], 20u);
  for (auto c : kGeneratingCombos) EXPECT_EQ(per[std::string(to_string(c))], 100u);
  EXPECT_NO_THROW(check_integrity(db.manifest));
}

TEST(Database, DeterministicRebuild) {
  const auto& db = mini_db();
  const auto dir = testutil::temp_dir("mini_db_again");
  auto again = build_database(list_pristine(testutil::corpus_dir(), "test"), dir, 7, mini_scale());
  annotate_benchmark(again, FrBackend::MsSsim);
  save_manifest(dir / "manifest.tsv", again);
  EXPECT_EQ(testutil::read_all(dir / "manifest.tsv"), testutil::read_all(db.dir / "manifest.tsv"));
  for (const auto& r : again.records)
    ASSERT_EQ(testutil::read_all(again.resolve(r)), testutil::read_all(db.manifest.resolve(r))) << r.id;
  fs::remove_all(dir);
}

TEST(Database, SmallPristineRejected) {
  const auto dir = testutil::temp_dir("small_pristine");
  save_plane(dir / "tiny.png", testutil::random_plane(100, 100, 1));
  EXPECT_THROW(build_database(list_pristine(dir), dir / "out", 1, mini_scale()), DomainError);
  EXPECT_THROW(list_pristine(dir / "absent"), IoError);
}

TEST(Manifest, RoundTrip) {
  const auto& db = mini_db();
  const auto back = load_manifest(db.dir / "manifest.tsv");
  ASSERT_EQ(back.records.size(), db.manifest.records.size());
  for (std::size_t i = 0; i < back.records.size(); ++i) EXPECT_EQ(back.records[i], db.manifest.records[i]);
  std::ostringstream a, b;
  write_manifest(a, back);
  write_manifest(b, db.manifest);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Manifest, IntegrityViolations) {
  auto m = mini_db().manifest;
  auto dup = m;
  dup.records.push_back(dup.records.back());
  dup.reindex();
  EXPECT_THROW(check_integrity(dup), DomainError);
  auto orphan = m;
  orphan.records.erase(std::find_if(orphan.records.begin(), orphan.records.end(),
                                    [](const ManifestRecord& r) { return r.role == Role::DR; }));
  orphan.reindex();
  EXPECT_THROW(check_integrity(orphan), DomainError);
  auto nopr = m;
  nopr.records.erase(nopr.records.begin());
  nopr.reindex();
  EXPECT_THROW(check_integrity(nopr), DomainError);
}

TEST(Manifest, MalformedFiles) {
  const auto dir = testutil::temp_dir("manifest_bad");
  std::ofstream(dir / "a.tsv") << "id\trole\n";
  EXPECT_THROW(load_manifest(dir / "a.tsv"), FormatError);
  std::ofstream(dir / "b.tsv") << kManifestHeader << "\nx\tQQ\tp\tx\t-\t0\t0\t1\t-\n";
  EXPECT_THROW(load_manifest(dir / "b.tsv"), FormatError);
  std::ofstream(dir / "c.tsv") << kManifestHeader << "\nx\tPR\tp\tx\t-\tzero\t0\t1\t-\n";
  EXPECT_THROW(load_manifest(dir / "c.tsv"), FormatError);
  EXPECT_THROW(load_manifest(dir / "none.tsv"), IoError);
}

TEST(Labels, PristineCopyScoresHundred) {
  const auto dir = testutil::temp_dir("labels_copy");
  fs::copy_file(testutil::corpus_dir() / "coins_a.png", dir / "coins_a.png");
  fs::copy_file(testutil::corpus_dir() / "coins_a.png", dir / "copy.png");
  DatasetManifest m;
  m.root = dir;
  m.records.push_back({"coins_a", Role::PR, "coins_a.png", "coins_a"});
  m.records.push_back({"copy", Role::DR, "copy.png", "coins_a", "GaussianBlur", 1, 0, 0});
  m.reindex();
  for (auto b : {FrBackend::Ssim, FrBackend::MsSsim}) {
    annotate_benchmark(m, b);
    EXPECT_FALSE(m.records[0].label);
    EXPECT_DOUBLE_EQ(*m.records[1].label, 100.0);
  }
}

TEST(Labels, MonotoneAlongBlurLadder) {
  const auto& db = mini_db();
  for (const auto& pid : db.manifest.pristine_ids()) {
    double prev = 101;
    for (int l : mini_scale().levels1) {
      const auto* r = db.manifest.find(dr_record_id(pid, DistortionType::GaussianBlur, l));
      ASSERT_TRUE(r);
      EXPECT_LE(*r->label, prev) << pid << " level " << l;
      prev = *r->label;
    }
  }
}

TEST(Labels, ConcentratedInUpperHalf) {
  std::size_t hi = 0, n = 0;
  for (const auto& r : mini_db().manifest.records) {
    if (!r.label) continue;
    EXPECT_GE(*r.label, 0.0);
    EXPECT_LE(*r.label, 100.0);
    hi += *r.label > 50.0;
    ++n;
  }
  EXPECT_GT(static_cast<double>(hi) / n, 0.5);
}

TEST(Correlation, SrccExamples) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{1, 3, 2, 5, 4}, rev{5, 4, 3, 2, 1};
  EXPECT_NEAR(srcc(a, b), 0.8, 1e-12);
  EXPECT_NEAR(srcc(a, rev), -1.0, 1e-12);
  std::vector<double> cubed;
  for (double x : b) cubed.push_back(std::exp(x) + x * x * x);
  EXPECT_NEAR(srcc(cubed, b), 1.0, 1e-12);
}

TEST(Correlation, SrccMatchesBruteForceOracle) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> small(0, 4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(10), b(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = t % 2 ? small(rng) : u(rng);
      b[i] = t % 3 ? u(rng) : small(rng);
    }
    if (std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; })) continue;
    if (std::all_of(b.begin(), b.end(), [&](double x) { return x == b[0]; })) continue;
    EXPECT_NEAR(srcc(a, b), oracle_pearson(oracle_ranks(a), oracle_ranks(b)), 1e-12);
  }
}

TEST(Correlation, PlccExamples) {
  std::vector<double> t, pred, neg;
  const LogisticParams rel{40.0, 0.9, 4.0, 1.5, 50.0};
  for (int i = 0; i < 40; ++i) {
    pred.push_back(0.25 * i);
    t.push_back(rel(pred.back()));
    neg.push_back(-t.back());
  }
  EXPECT_NEAR(plcc(t, t), 1.0, 1e-6);
  EXPECT_NEAR(plcc(pred, t), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(plcc(neg, t)), 1.0, 1e-6);
}

TEST(Correlation, PlccAffineInvariance) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> noise(0, 0.05);
  std::vector<double> pred, tgt;
  for (int i = 0; i < 50; ++i) {
    tgt.push_back(i / 50.0);
    pred.push_back(tgt.back() + noise(rng));
  }
  const double base = plcc(pred, tgt);
  for (auto [s, o] : {std::pair{2.0, 1.0}, std::pair{0.5, -3.0}, std::pair{10.0, 0.0}}) {
    std::vector<double> p2;
    for (double p : pred) p2.push_back(s * p + o);
    EXPECT_NEAR(plcc(p2, tgt), base, 1e-6);
  }
}

TEST(Correlation, DegenerateInputs) {
  const std::vector<double> c{1, 1, 1, 1, 1}, v{1, 2, 3, 4, 5}, three{1, 2, 3};
  EXPECT_THROW(srcc(c, v), DegenerateInput);
  EXPECT_THROW(plcc(c, v), DegenerateInput);
  EXPECT_THROW(srcc(three, three), DegenerateInput);
  EXPECT_THROW(srcc(v, three), DomainError);
}

TEST(Behavior, CurvesCoverScale) {
  const auto curves = extract_behavior(mini_db().rows, ComboType::BlurJpeg, FrBackend::Ssim);
  EXPECT_EQ(curves.size(), 4u * 5);
  for (const auto& c : curves) {
    ASSERT_EQ(c.points.size(), 5u);
    for (std::size_t i = 1; i < c.points.size(); ++i) EXPECT_LT(c.points[i - 1].level2, c.points[i].level2);
    EXPECT_TRUE(std::isfinite(c.m));
    EXPECT_TRUE(std::isfinite(c.rmse));
  }
  EXPECT_THROW(extract_behavior(std::vector<ScoreRow>{}, ComboType::BlurJpeg, FrBackend::Ssim), DomainError);
}

TEST(Behavior, MildestStageOneIsNearlyPerfect) {
  for (auto combo : kGeneratingCombos)
    for (const auto& c : extract_behavior(mini_db().rows, combo, FrBackend::Ssim)) {
      if (c.level1 != 1) continue;
      for (const auto& p : c.points) EXPECT_LE(std::abs(p.as_fd - p.rs_fd), 0.02) << to_string(combo);
    }
}

TEST(Behavior, MildestStageTwoStaysAtDr) {
  for (auto combo : kGeneratingCombos) {
    if (combo == ComboType::NoiseJpeg) continue;
    for (const auto& c : extract_behavior(mini_db().rows, combo, FrBackend::Ssim)) {
      const auto& p = c.points.front();
      ASSERT_EQ(p.level2, 1);
      EXPECT_GE(p.rs_fd, 0.97) << to_string(combo) << ' ' << c.pristine_id << ' ' << c.level1;
      EXPECT_LE(std::abs(p.as_fd - c.as_dr), 0.02) << to_string(combo) << ' ' << c.pristine_id << ' ' << c.level1;
    }
  }
}

TEST(Behavior, OvershootDirection) {
  const auto& rows = mini_db().rows;
  auto curves = extract_behavior(rows, ComboType::NoiseJp2k, FrBackend::Ssim);
  const auto bj = extract_behavior(rows, ComboType::BlurJpeg, FrBackend::Ssim);
  curves.insert(curves.end(), bj.begin(), bj.end());
  const auto rep = detect_overshoot(curves);
  EXPECT_GE(rep.points_for(ComboType::NoiseJp2k), 1u);
  EXPECT_EQ(rep.points_for(ComboType::BlurJpeg), 0u);
}

TEST(Behavior, FlatCurveHasNoOvershoot) {
  BehaviorCurve c;
  c.combo = ComboType::NoiseJp2k;
  c.as_dr = 0.8;
  for (int l = 1; l <= 17; ++l) c.points.push_back({l, 0.9, 0.8});
  EXPECT_EQ(detect_overshoot({c}).points_for(ComboType::NoiseJp2k), 0u);
  c.points[3].as_fd = 0.8 + kOvershootThreshold;
  EXPECT_EQ(detect_overshoot({c}).points_for(ComboType::NoiseJp2k), 0u);
  c.points[3].as_fd = 0.8021;
  EXPECT_EQ(detect_overshoot({c}).points_for(ComboType::NoiseJp2k), 1u);
}

TEST(Behavior, CsvAndSvgOutput) {
  const auto curves = extract_behavior(mini_db().rows, ComboType::NoiseJp2k, FrBackend::Ssim);
  std::ostringstream csv;
  write_curve_csv(csv, curves);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "combo,pristine_id,level1,level2,as_dr,rs_fd,as_fd");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4 * 5 * 5);
  std::vector<BehaviorCurve> one;
  for (const auto& c : curves)
    if (c.pristine_id == "grass_a") one.push_back(c);
  std::ostringstream svg;
  write_behavior_svg(svg, one, "grass_a");
  const auto s = svg.str();
  std::size_t n = 0;
  for (auto p = s.find("class=\"curve\""); p != std::string::npos; p = s.find("class=\"curve\"", p + 1)) ++n;
  EXPECT_EQ(n, 5u);
}

TEST(Evaluate, PerfectPredictorScoresOne) {
  const auto& rows = mini_db().rows;
  const Method perfect{"perfect", [](const ScoreRow& r, ComboType) { return r.label; }};
  const auto cells = evaluate(rows, {perfect});
  EXPECT_EQ(cells.size(), 7u);
  for (const auto& c : cells) {
    EXPECT_NEAR(c.plcc, 1.0, 1e-6) << short_name(c.group);
    EXPECT_NEAR(c.srcc, 1.0, 1e-12) << short_name(c.group);
  }
  EXPECT_EQ(find_cell(cells, "perfect", ComboType::AllData)->n, 500u);
  EXPECT_EQ(find_cell(cells, "perfect", ComboType::NbjJpeg)->n, 300u);
}

TEST(Evaluate, LowerIsBetterNegates) {
  const auto& rows = mini_db().rows;
  const Method inverted{"inv", [](const ScoreRow& r, ComboType) { return 100.0 - r.label; }, true};
  for (const auto& c : evaluate(rows, {inverted})) EXPECT_NEAR(c.srcc, 1.0, 1e-12);
}

TEST(Evaluate, MissingModelGivesNa) {
  const auto& rows = mini_db().rows;
  const auto cells = evaluate(rows, {model_method("Model 1", {})});
  for (const auto& c : cells) EXPECT_TRUE(std::isnan(c.srcc));
  std::ostringstream os;
  write_results_csv(os, cells);
  EXPECT_NE(os.str().find("NA"), std::string::npos);
  EXPECT_EQ(os.str().substr(0, 16), "criterion,method");
}

TEST(Evaluate, BaselineOneMatchesRsFd) {
  const auto& rows = mini_db().rows;
  const auto cells = evaluate(rows, {baseline1_method(FrBackend::Ssim)});
  std::vector<double> p, t;
  for (const auto& r : rows)
    if (r.combo == ComboType::BlurJpeg) {
      p.push_back(r.rs_fd_of(FrBackend::Ssim));
      t.push_back(r.label);
    }
  EXPECT_DOUBLE_EQ(find_cell(cells, "Baseline-1", ComboType::BlurJpeg)->srcc, srcc(p, t));
}

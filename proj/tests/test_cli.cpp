#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <map>
#include <sstream>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run cli(const std::string& args) {
  static int counter = 0;
  const auto dir = fs::temp_directory_path() / "driqa_test_cli_io";
  fs::create_directories(dir);
  const auto o = dir / ("out" + std::to_string(counter) + ".txt");
  const auto e = dir / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + DRIQA_CLI + "\" " + args + " >\"" + o.string() + "\" 2>\"" + e.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testutil::read_all(o);
  r.err = testutil::read_all(e);
  return r;
}

std::string corpus() { return "\"" + testutil::corpus_dir().string() + "\""; }

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string k, v;
  while (is >> k >> v) {
    kv[k] = v;
    is.ignore(1 << 20, '\n');
  }
  return kv;
}

std::size_t count_files(const fs::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

// Small train/val databases shared by the fit/score/evaluate tests.
struct Workspace {
  fs::path root;
  Workspace() {
    root = testutil::temp_dir("cli_ws");
    for (const char* split : {"v1", "v2"}) {
      const auto r = cli("generate --pristine " + corpus() + " --split " + split + " --out \"" +
                         (root / split).string() + "\" --seed 3 --levels1 1,6,11 --levels2 1,9,17");
      EXPECT_EQ(r.code, 0) << r.err;
    }
  }
  std::string db(const char* split) const { return "\"" + (root / split).string() + "\""; }
  std::string path(const std::string& p) const { return "\"" + (root / p).string() + "\""; }
};

const Workspace& ws() {
  static const Workspace w;
  return w;
}

}  // namespace

TEST(CliGenerate, MiniDatabaseCount) {
  const auto out = testutil::temp_dir("cli_gen");
  const std::string args = "generate --pristine " + corpus() + " --split test --out \"" + out.string() +
                           "\" --seed 7 --levels1 1,4,7,10,11 --levels2 1,5,9,13,17";
  const auto r = cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_files(out / "dr", ".png") + count_files(out / "fd", ".png"), 560u);
  EXPECT_EQ(count_files(out / "pr", ".png"), 4u);
  EXPECT_TRUE(fs::exists(out / "provenance.txt"));
  const std::string first = testutil::read_all(out / "manifest.tsv");
  const std::string prov = testutil::read_all(out / "provenance.txt");
  ASSERT_EQ(cli(args).code, 0);
  EXPECT_EQ(testutil::read_all(out / "manifest.tsv"), first);
  EXPECT_EQ(testutil::read_all(out / "provenance.txt"), prov);
  EXPECT_NE(prov.find("command generate"), std::string::npos);
  EXPECT_NE(prov.find("input "), std::string::npos);
}

TEST(CliGenerate, MissingPristineDirectory) {
  const auto r = cli("generate --pristine /nonexistent/driqa --out \"" + testutil::temp_dir("cli_missing").string() + "\"");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliGenerate, BadLevelsAreValidationErrors) {
  const auto r = cli("generate --pristine " + corpus() + " --split test --levels1 0,12 --out \"" +
                     testutil::temp_dir("cli_badlevels").string() + "\"");
  EXPECT_EQ(r.code, 2);
}

TEST(CliGeneral, VersionAndUsage) {
  const auto v = cli("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("ladders").code, 0);
}

TEST(CliFit, OverlappingSplitsRejected) {
  const auto r = cli("fit --train " + ws().db("v1") + " --val " + ws().db("v1") + " --out " + ws().path("fit_overlap"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("share"), std::string::npos);
}

TEST(CliFit, Model1WritesParameters) {
  const auto out = ws().root / "fit_m1";
  const auto r = cli("fit --train " + ws().db("v1") + " --val " + ws().db("v2") + " --model 1 --combo B-JPG --out \"" +
                     out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = testutil::read_all(out / "model1_B-JPG_SSIM-SSIM.params");
  const auto kv = key_values(text);
  EXPECT_TRUE(std::isfinite(std::stod(kv.at("p1"))));
  EXPECT_TRUE(std::isfinite(std::stod(kv.at("p2"))));
  EXPECT_TRUE(kv.count("val_plcc"));
  EXPECT_TRUE(kv.count("val_srcc"));
  EXPECT_TRUE(fs::exists(out / "fit_summary.csv"));
  EXPECT_TRUE(fs::exists(out / "provenance.txt"));
}

TEST(CliFit, Model2AllGroupings) {
  const auto out = ws().root / "fit_m2";
  const auto r = cli("fit --train " + ws().db("v1") + " --val " + ws().db("v2") + " --model 2 --combo all --out \"" +
                     out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_files(out, ".params"), 7u);
}

TEST(CliScore, AnchorIdentityThroughCli) {
  const auto params = ws().root / "fit_m1" / "model1_B-JPG_SSIM-SSIM.params";
  if (!fs::exists(params)) ASSERT_EQ(cli("fit --train " + ws().db("v1") + " --val " + ws().db("v2") +
                                         " --model 1 --combo B-JPG --out " + ws().path("fit_m1")).code, 0);
  const auto pr = ws().root / "v1" / "pr" / "camera_a.png";
  const auto dr = ws().root / "v1" / "dr" / "camera_a_Blur_6.png";
  const auto r = cli("score --arch 100100 --pr \"" + pr.string() + "\" --dr \"" + dr.string() + "\" --fd \"" +
                     dr.string() + "\" --params \"" + params.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("rs_fd"), "1");
  EXPECT_NEAR(std::stod(kv.at("predicted_as_fd")), std::stod(kv.at("as_dr")), 1e-12);
  EXPECT_NEAR(std::stod(kv.at("true_as_fd")), std::stod(kv.at("as_dr")), 1e-12);
}

TEST(CliScore, InvalidArchitecture) {
  const auto img = (testutil::corpus_dir() / "coins_a.png").string();
  const auto r = cli("score --arch 000011 --dr \"" + img + "\" --fd \"" + img + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("invalid architecture"), std::string::npos);
}

TEST(CliScore, ScenarioTwoNeedsNiqeModel) {
  const auto model = ws().root / "niqe.model";
  ASSERT_EQ(cli("train-niqe --pristine " + corpus() + " --split niqe,v1,v2,test --out \"" + model.string() + "\"").code, 0);
  const auto out = ws().root / "fit_s2";
  const auto f = cli("fit --train " + ws().db("v1") + " --val " + ws().db("v2") +
                     " --arch 001100 --model 1 --combo B-JPG --niqe-model \"" + model.string() + "\" --out \"" +
                     out.string() + "\"");
  ASSERT_EQ(f.code, 0) << f.err;
  const auto params = out / "model1_B-JPG_NIQE-SSIM.params";
  ASSERT_TRUE(fs::exists(params));
  const auto dr = ws().root / "v2" / "dr" / "brick_a_Blur_6.png";
  const auto fd = ws().root / "v2" / "fd" / "brick_a_Blur-JPEG_6_9.png";
  const std::string base = "score --arch 001100 --dr \"" + dr.string() + "\" --fd \"" + fd.string() +
                           "\" --params \"" + params.string() + "\"";
  const auto missing = cli(base);
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("--niqe-model"), std::string::npos);
  const auto ok = cli(base + " --niqe-model \"" + model.string() + "\"");
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto kv = key_values(ok.out);
  EXPECT_TRUE(kv.count("nr_dr"));
  EXPECT_TRUE(kv.count("mapped_as_dr"));
  EXPECT_TRUE(std::isfinite(std::stod(kv.at("predicted_as_fd"))));
}

TEST(CliEvaluate, OracleTableIsAllOnes) {
  const auto out = ws().root / "eval_oracle";
  const auto r = cli("evaluate --test " + ws().db("v2") + " --oracle --out \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(testutil::read_all(out / "results.csv"));
  std::string line;
  int oracle_rows = 0;
  while (std::getline(is, line)) {
    if (line.find(",Oracle,") == std::string::npos) continue;
    ++oracle_rows;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    std::getline(cells, cell, ',');
    int n = 0;
    while (std::getline(cells, cell, ',')) {
      EXPECT_EQ(cell, "1.0000") << line;
      ++n;
    }
    EXPECT_EQ(n, 7);
  }
  EXPECT_EQ(oracle_rows, 2);
}

TEST(CliEvaluate, ModelsAndBaselineReported) {
  const auto params = ws().root / "fit_m2";
  if (!fs::exists(params)) GTEST_SKIP() << "Model2AllGroupings did not run";
  const auto out = ws().root / "eval_models";
  const auto r = cli("evaluate --test " + ws().db("v2") + " --params \"" + params.string() + "\" --out \"" +
                     out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = testutil::read_all(out / "results.csv");
  EXPECT_NE(csv.find("Model2[SSIM-SSIM]"), std::string::npos);
  EXPECT_NE(csv.find("Baseline-1"), std::string::npos);
}

TEST(CliBehavior, SvgCurveCount) {
  const auto out = ws().root / "behavior";
  const auto r = cli("behavior --test " + ws().db("v1") + " --combo N-JP2 --format svg --out \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t plots = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    if (e.path().extension() != ".svg") continue;
    ++plots;
    const auto s = testutil::read_all(e.path());
    std::size_t n = 0;
    for (auto p = s.find("class=\"curve\""); p != std::string::npos; p = s.find("class=\"curve\"", p + 1)) ++n;
    EXPECT_EQ(n, 3u) << e.path();
  }
  EXPECT_EQ(plots, 4u);
  for (const char* f : {"curves.csv", "curve_fits.csv", "overshoot.csv", "behavior_summary.csv", "provenance.txt"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(cli("behavior --test " + ws().db("v1") + " --format pdf --out \"" + out.string() + "\"").code, 2);
}

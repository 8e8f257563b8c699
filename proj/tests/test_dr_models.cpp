#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "driqa/arch.hpp"
#include "driqa/baselines.hpp"
#include "driqa/dr_model.hpp"
#include "driqa/logistic.hpp"
#include "driqa/models.hpp"
#include "driqa/svr.hpp"
#include "test_util.hpp"

using namespace driqa;

namespace {

std::set<std::string> listed(const char* text) {
  std::set<std::string> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok.back() == ',') tok.pop_back();
    out.insert(tok);
  }
  return out;
}

const char* kType0 =
    "000100, 000101, 000110, 000111, 001001, 001010, 001011, 001100, 001101, 001110, 001111, 010001, "
    "010010, 010011, 010100, 010101, 010110, 010111, 011001, 011010, 011011, 011100, 011101, 011110, "
    "011111";
const char* kType1 =
    "100001, 100010, 100011, 100100, 100101, 100110, 100111, 101001, 101010, 101011, 101100, 101101, "
    "101110, 101111, 110001, 110010, 110011, 110100, 110101, 110110, 110111, 111001, 111010, 111011, "
    "111100, 111101, 111110, 111111";
const char* kInvalid = "000000, 000001, 000010, 000011, 001000, 010000, 011000, 100000, 101000, 110000, 111000";

std::vector<CurveGroup> model1_groups(double p1, double p2) {
  const Model1Params p{p1, p2};
  std::vector<CurveGroup> gs;
  for (double a : {0.55, 0.7, 0.8, 0.9, 0.97}) {
    CurveGroup g{a, {}, {}};
    for (double r : {0.5, 0.65, 0.8, 0.9, 0.97}) {
      g.rs_fd.push_back(r);
      g.as_fd.push_back(model1_predict(p, a, r));
    }
    gs.push_back(g);
  }
  return gs;
}

std::vector<FusionSample> model2_samples(const Model2Params& p) {
  std::vector<FusionSample> s;
  for (double a = 0.5; a <= 1.0001; a += 0.05)
    for (double r = 0.4; r <= 1.0001; r += 0.06) s.push_back({a, r, model2_predict(p, a, r)});
  return s;
}

double surface(double a, double r) {
  return model2_predict(Model2Params{0.1, -0.15, 0.2, 0.5, 0.6, -0.3}, a, r);
}

}  // namespace

TEST(ArchCode, ParseAndFormat) {
  EXPECT_EQ(ArchCode::parse("100100"), kScenario1);
  EXPECT_EQ(ArchCode::parse("001100"), kScenario2);
  EXPECT_EQ(kScenario1.str(), "100100");
  EXPECT_FALSE(ArchCode::parse("10010"));
  EXPECT_FALSE(ArchCode::parse("10010x"));
  EXPECT_TRUE(kScenario1.bit(1));
  EXPECT_TRUE(kScenario1.bit(4));
  EXPECT_FALSE(kScenario1.bit(2));
}

TEST(ArchCode, NamedExamples) {
  EXPECT_EQ(classify_arch(*ArchCode::parse("100100")), ArchType::Type1);
  EXPECT_EQ(classify_arch(*ArchCode::parse("001100")), ArchType::Type0);
  EXPECT_EQ(classify_arch(*ArchCode::parse("000011")), ArchType::Invalid);
}

TEST(ArchCode, ExhaustiveClassificationMatchesListing) {
  const auto t0 = listed(kType0), t1 = listed(kType1), inv = listed(kInvalid);
  ASSERT_EQ(t0.size(), 25u);
  ASSERT_EQ(t1.size(), 28u);
  ASSERT_EQ(inv.size(), 11u);
  int counts[3] = {0, 0, 0};
  for (int b = 0; b < 64; ++b) {
    const ArchCode code(static_cast<std::uint8_t>(b));
    const auto t = classify_arch(code);
    ++counts[static_cast<int>(t)];
    const auto& expected = t == ArchType::Type0 ? t0 : t == ArchType::Type1 ? t1 : inv;
    EXPECT_TRUE(expected.count(code.str())) << code.str() << " classified " << to_string(t);
  }
  EXPECT_EQ(counts[0], 25);
  EXPECT_EQ(counts[1], 28);
  EXPECT_EQ(counts[2], 11);
}

TEST(Model1, AnchorIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-3, 3), a(0, 1.05);
  for (int i = 0; i < 1000; ++i) {
    const Model1Params p{d(rng), d(rng)};
    const double x = a(rng);
    EXPECT_NEAR(model1_predict(p, x, 1.0), x, 1e-12);
  }
}

TEST(Model1, WorkedExamples) {
  EXPECT_NEAR(model1_predict({0.0, 1.0}, 0.9495, 0.9253), 0.8748, 1e-12);
  EXPECT_NEAR(model1_predict({0.5, 0.5}, 1.0, 0.8), 0.8, 1e-12);
  EXPECT_THROW(model1_predict({0.5, 0.5}, std::nan(""), 0.8), DomainError);
  EXPECT_THROW(model1_predict({0.5, 0.5}, 0.9, INFINITY), DomainError);
}

TEST(Model1, FitRecoversParameters) {
  const auto fit = fit_model1(model1_groups(0.7, 0.4));
  EXPECT_NEAR(fit.params.p1, 0.7, 1e-9);
  EXPECT_NEAR(fit.params.p2, 0.4, 1e-9);
  EXPECT_NEAR(fit.tier2_r2, 1.0, 1e-9);
  ASSERT_EQ(fit.slopes.size(), 5u);
  EXPECT_NEAR(fit.slopes[0], 0.7 * 0.55 + 0.4, 1e-12);
}

TEST(Model1, RefitOnOwnPredictionsIsIdempotent) {
  const auto first = fit_model1(model1_groups(-0.3, 1.2));
  const auto again = fit_model1(model1_groups(first.params.p1, first.params.p2));
  EXPECT_NEAR(again.params.p1, first.params.p1, 1e-8);
  EXPECT_NEAR(again.params.p2, first.params.p2, 1e-8);
}

TEST(Model1, DegenerateInputs) {
  auto gs = model1_groups(0.7, 0.4);
  for (auto& g : gs) g.as_dr = 0.8;
  EXPECT_THROW(fit_model1(gs), DegenerateInput);
  EXPECT_THROW(fit_model1({model1_groups(0.7, 0.4)[0]}), DegenerateInput);
  auto flat = model1_groups(0.7, 0.4);
  for (auto& r : flat[1].rs_fd) r = 1.0;
  EXPECT_THROW(fit_model1(flat), DegenerateInput);
  auto thin = model1_groups(0.7, 0.4);
  thin[2].rs_fd.resize(2);
  thin[2].as_fd.resize(2);
  EXPECT_THROW(fit_model1(thin), DegenerateInput);
}

TEST(Model2, ReducesToModel1) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-2, 2), u(0, 1.05);
  for (int i = 0; i < 200; ++i) {
    const Model1Params p{d(rng), d(rng)};
    const auto q = Model2Params::from_model1(p);
    for (int j = 0; j < 10; ++j) {
      const double a = u(rng), r = u(rng);
      EXPECT_NEAR(model2_predict(q, a, r), model1_predict(p, a, r), 1e-12);
    }
  }
}

TEST(Model2, ConstantModel) {
  Model2Params p;
  p.f = 0.5;
  EXPECT_DOUBLE_EQ(model2_predict(p, 0.3, 0.9), 0.5);
  EXPECT_THROW(model2_predict(p, NAN, 0.9), DomainError);
}

TEST(Model2, FitRecoversCoefficients) {
  const Model2Params truth{0.3, -0.2, 0.5, 0.4, 0.25, -0.1};
  const auto p = fit_model2(model2_samples(truth));
  EXPECT_NEAR(p.a, truth.a, 1e-8);
  EXPECT_NEAR(p.b, truth.b, 1e-8);
  EXPECT_NEAR(p.c, truth.c, 1e-8);
  EXPECT_NEAR(p.d, truth.d, 1e-8);
  EXPECT_NEAR(p.e, truth.e, 1e-8);
  EXPECT_NEAR(p.f, truth.f, 1e-8);
  const auto again = fit_model2(model2_samples(p));
  EXPECT_NEAR(again.a, p.a, 1e-8);
  EXPECT_NEAR(again.f, p.f, 1e-8);
}

TEST(Model2, DegenerateDesigns) {
  auto s = model2_samples(Model2Params{0, 0, 1, 0, 0, 0});
  s.resize(5);
  EXPECT_THROW(fit_model2(s), DegenerateInput);
  std::vector<FusionSample> collinear;
  for (int i = 0; i < 30; ++i) {
    const double v = 0.3 + 0.02 * i;
    collinear.push_back({v, v, v * v});
  }
  EXPECT_THROW(fit_model2(collinear), DegenerateInput);
}

TEST(Logistic, InflectionIdentity) {
  const LogisticParams p{2.0, 3.0, 0.7, 0.5, 0.1};
  EXPECT_DOUBLE_EQ(p(0.7), 0.5 * 0.7 + 0.1);
}

TEST(Logistic, LinearData) {
  std::vector<double> n, f;
  for (int i = 0; i < 30; ++i) {
    n.push_back(0.5 * i);
    f.push_back(0.4 * n.back() + 0.1);
  }
  const auto fit = fit_logistic(n, f);
  double se = 0;
  for (std::size_t i = 0; i < n.size(); ++i) se += std::pow(fit.params(n[i]) - f[i], 2);
  EXPECT_LE(std::sqrt(se / n.size()), 1e-6);
}

TEST(Logistic, SigmoidData) {
  const LogisticParams truth{0.8, -1.5, 6.0, -0.01, 0.55};
  std::vector<double> n, f;
  for (int i = 0; i < 60; ++i) {
    n.push_back(0.2 * i);
    f.push_back(truth(n.back()));
  }
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const auto fit = fit_logistic(n, f);
  EXPECT_LE(fit.rmse, 1e-3 * (*hi - *lo));
  EXPECT_LE(fit.rmse, fit.best_initial_rmse);
}

TEST(Logistic, NeverWorseThanInitialization) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> n, f;
    for (int i = 0; i < 40; ++i) {
      n.push_back(i * 0.3);
      f.push_back(1.0 / (1.0 + std::exp(0.8 * (n.back() - 5))) + noise(rng));
    }
    const auto fit = fit_logistic(n, f);
    EXPECT_LE(fit.rmse, fit.best_initial_rmse);
  }
}

TEST(Logistic, DegenerateInputs) {
  std::vector<double> n(12, 3.0), f(12, 0.5);
  EXPECT_THROW(fit_logistic(n, f), DegenerateInput);
  std::vector<double> few{1, 2, 3}, ff{1, 2, 3};
  EXPECT_THROW(fit_logistic(few, ff), DegenerateInput);
}

TEST(Svr, ConstantTargets) {
  std::vector<SvrSample> s;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.3, 1.0);
  for (int i = 0; i < 40; ++i) s.push_back({{u(rng), u(rng)}, 0.42});
  const auto m = train_svr(s, {4.0, 0.5, 2.0, 1e-3});
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(m.predict({u(rng), u(rng)}), 0.42, 1e-6);
}

TEST(Svr, LearnsQuadraticSurface) {
  std::vector<SvrSample> train, val;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) {
      const double a = 0.5 + 0.5 * i / 14.0, r = 0.4 + 0.6 * j / 14.0;
      train.push_back({{a, r}, surface(a, r)});
    }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(0.5, 1.0), ur(0.4, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double a = ua(rng), r = ur(rng);
    val.push_back({{a, r}, surface(a, r)});
  }
  const auto best = svr_grid_search(train, val);
  double se = 0;
  for (int i = 0; i < 200; ++i) {
    const double a = ua(rng), r = ur(rng);
    se += std::pow(best.model.predict({a, r}) - surface(a, r), 2);
  }
  EXPECT_LE(std::sqrt(se / 200), 0.02);
  double hull = 0;
  for (const auto& t : train) hull = std::max(hull, std::abs(best.model.predict(t.x) - t.y));
  EXPECT_LE(hull, 0.02);
}

TEST(Svr, DuplicatesEquivalentToWeights) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.4, 1.0);
  std::vector<SvrSample> dup, weighted;
  for (int i = 0; i < 30; ++i) {
    const double a = u(rng), r = u(rng);
    const SvrSample s{{a, r}, surface(a, r)};
    dup.push_back(s);
    weighted.push_back(s);
    if (i % 3 == 0) {
      dup.push_back(s);
      weighted.back().weight = 2.0;
    }
  }
  const SvrHyper h{8.0, 0.5, 4.0, 1e-6};
  const auto a = train_svr(dup, h), b = train_svr(weighted, h);
  for (int i = 0; i < 100; ++i) {
    const Feature2 x{u(rng), u(rng)};
    EXPECT_NEAR(a.predict(x), b.predict(x), 1e-4);
  }
}

TEST(Svr, LoneSupportVector) {
  SvrModel m;
  m.hyper.gamma = 37.0;
  m.support = {{0.3, 0.6}};
  m.coef = {1.0};
  EXPECT_DOUBLE_EQ(m.predict({0.3, 0.6}), 1.0);
}

TEST(Svr, LipschitzBound) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1), c(-2, 2), g(0.1, 20);
  for (int trial = 0; trial < 50; ++trial) {
    SvrModel m;
    m.hyper.gamma = g(rng);
    m.scale = {1.0 + 3 * u(rng), 1.0 + 3 * u(rng)};
    double sum_abs = 0;
    for (int k = 0; k < 8; ++k) {
      m.support.push_back({u(rng), u(rng)});
      m.coef.push_back(c(rng));
      sum_abs += std::abs(m.coef.back());
    }
    const double lip = sum_abs * std::sqrt(2 * m.hyper.gamma / std::exp(1.0)) * std::max(m.scale[0], m.scale[1]);
    for (int k = 0; k < 20; ++k) {
      const Feature2 x{u(rng), u(rng)}, y{x[0] + 0.01 * c(rng), x[1] + 0.01 * c(rng)};
      const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
      EXPECT_LE(std::abs(m.predict(x) - m.predict(y)), lip * dist + 1e-12);
    }
  }
}

TEST(Svr, DualFeasibility) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.4, 1.0);
  std::normal_distribution<double> noise(0, 0.02);
  std::vector<SvrSample> s;
  for (int i = 0; i < 60; ++i) {
    const double a = u(rng), r = u(rng);
    s.push_back({{a, r}, surface(a, r) + noise(rng)});
  }
  for (const SvrHyper h : {SvrHyper{1.0, 0.2, 1.0, 1e-3}, SvrHyper{64.0, 0.6, 16.0, 1e-3}}) {
    const auto m = train_svr(s, h);
    const double box = h.c / s.size();
    double sum = 0;
    for (double a : m.coef) {
      EXPECT_LE(std::abs(a), box * (1 + 1e-12));
      sum += a;
    }
    EXPECT_NEAR(sum, 0.0, 1e-9 * h.c);
    for (const auto& x : s) EXPECT_TRUE(std::isfinite(m.predict(x.x)));
  }
}

TEST(Svr, InvalidHyperParameters) {
  std::vector<SvrSample> s{{{0.1, 0.2}, 0.3}};
  EXPECT_THROW(train_svr(s, {0.0, 0.5, 1.0, 1e-3}), DomainError);
  EXPECT_THROW(train_svr(s, {1.0, 1.5, 1.0, 1e-3}), DomainError);
  EXPECT_THROW(train_svr(std::vector<SvrSample>{}, {}), DegenerateInput);
}

TEST(Baselines, Identities) {
  const auto dr = testutil::fixture("coins_a");
  EXPECT_DOUBLE_EQ(baseline1(dr, dr, FrBackend::Ssim), 1.0);
  EXPECT_DOUBLE_EQ(baseline1(dr, dr, FrBackend::MsSsim), 1.0);
  EXPECT_DOUBLE_EQ(baseline3_combine(1.0, 0.83), 0.83);
  EXPECT_DOUBLE_EQ(baseline3_combine(1.7, 0.83), 0.83);
  EXPECT_DOUBLE_EQ(baseline3_combine(-0.2, 0.83), 0.0);
  const auto fd = gaussian_blur(dr, 1.5);
  NiqeModel flat;
  flat.covariance = FeatureMatrix::Identity();
  const LogisticParams one{0.0, 0.0, 0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(baseline3(dr, fd, flat, one), msssim(dr, fd));
}

TEST(ParamFile, RoundTripsEveryKind) {
  const auto dir = testutil::temp_dir("params");
  FittedModel m1;
  m1.combo = ComboType::BlurJpeg;
  m1.m1 = {0.123456789012345678, -1.0 / 3.0, ComboType::BlurJpeg, {}};
  m1.meta = {123, 0xdeadbeefcafef00dULL, 45, 0.91, 0.88};
  FittedModel m2 = m1;
  m2.kind = ModelKind::Model2;
  m2.m2 = {0.1, 0.2, 0.3, 0.4, 0.5, 1e-300, ComboType::BlurJpeg, {}};
  m2.pair = {NrBackend::Niqe, FrBackend::MsSsim};
  m2.arch = kScenario2;
  m2.nr_map = LogisticParams{0.5, -1.0, 4.0, 0.01, 0.6};
  FittedModel m3 = m1;
  m3.kind = ModelKind::Model3;
  std::vector<SvrSample> s;
  for (int i = 0; i < 25; ++i) s.push_back({{0.5 + 0.02 * i, 1.0 - 0.015 * i}, surface(0.5 + 0.02 * i, 1.0 - 0.015 * i)});
  m3.m3 = train_svr(s, {16.0, 0.5, 2.0, 1e-3});
  for (const auto* m : {&m1, &m2, &m3}) {
    save_fitted_model(dir / "m.params", *m);
    const auto back = load_fitted_model(dir / "m.params");
    EXPECT_EQ(format_fitted_model(back), format_fitted_model(*m));
    for (double a : {0.6, 0.8, 0.95})
      for (double r : {0.5, 0.9}) EXPECT_EQ(back.predict(a, r), m->predict(a, r));
  }
}

TEST(ParamFile, RejectsMalformedInput) {
  const auto dir = testutil::temp_dir("params_bad");
  std::ofstream(dir / "a.params") << "driqa-params 1\nkind model9\n";
  EXPECT_THROW(load_fitted_model(dir / "a.params"), FormatError);
  std::ofstream(dir / "b.params") << "hello\n";
  EXPECT_THROW(load_fitted_model(dir / "b.params"), FormatError);
  EXPECT_THROW(load_fitted_model(dir / "none.params"), IoError);
}

// tests/length-model-test.cc

// Copyright 2026  The actset Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "actset/grammar.h"
#include "actset/length-model.h"
#include "test-util.h"

namespace actset {
namespace {

using testing::TempDir;
using testing::WriteFile;

Corpus SetCorpus(const std::vector<std::pair<int64_t, ActionSet>> &videos,
                 int32_t num_classes) {
  std::vector<std::string> names;
  for (int32_t c = 0; c < num_classes; c++) names.push_back("c" + std::to_string(c));
  Corpus corpus;
  corpus.class_table = ClassTable(names, 0);
  int n = 0;
  for (const auto &[T, set] : videos) {
    VideoRecord v;
    v.id = "v" + std::to_string(n++);
    v.features = FeatureMatrix::Zero(T, 1);
    v.action_set = set;
    corpus.videos.push_back(std::move(v));
  }
  return corpus;
}

// Independent evaluation of sum_i (sum_{c in A_i} lambda_c - T_i)^2.
double Objective(const std::vector<std::pair<int64_t, ActionSet>> &videos,
                 const std::vector<double> &lambda) {
  double f = 0;
  for (const auto &[T, set] : videos) {
    double s = -static_cast<double>(T);
    for (ClassId c : set) s += lambda[c];
    f += s * s;
  }
  return f;
}

TEST_CASE("naive estimate") {
  MeanLengths m = EstimateNaive(SetCorpus({{100, {0, 1}}, {200, {0}}}, 2));
  CHECK(m.lambda[0] == doctest::Approx(125));
  CHECK(m.lambda[1] == doctest::Approx(50));

  m = EstimateNaive(SetCorpus({{90, {0, 1, 2}}}, 3));
  for (double l : m.lambda) CHECK(l == doctest::Approx(30));

  MeanLengths one = EstimateNaive(SetCorpus({{100, {0, 1}}, {60, {1}}}, 2));
  MeanLengths two =
      EstimateNaive(SetCorpus({{100, {0, 1}}, {60, {1}}, {100, {0, 1}}, {60, {1}}}, 2));
  CHECK(one.lambda == two.lambda);

  MeanLengths gap = EstimateNaive(SetCorpus({{100, {0}}, {60, {1}}}, 3));
  CHECK(gap.imputed == std::vector<bool>{false, false, true});
  CHECK(gap.lambda[2] == doctest::Approx(80));

  CHECK_THROWS(EstimateNaive(SetCorpus({}, 2)));
}

TEST_CASE("loss-based estimate on the two-video instance") {
  std::vector<std::pair<int64_t, ActionSet>> videos = {{100, {0, 1}}, {100, {0}}};
  MeanLengths m = EstimateLossBased(SetCorpus(videos, 2), 10);
  CHECK(m.lambda[0] == doctest::Approx(95).epsilon(1e-6));
  CHECK(m.lambda[1] == doctest::Approx(10).epsilon(1e-6));

  // Grid search over {1..200}^2 restricted to the feasible region.
  double best = INFINITY;
  int ba = 0, bb = 0;
  for (int a = 10; a <= 200; a++)
    for (int b = 10; b <= 200; b++) {
      double f = Objective(videos, {double(a), double(b)});
      if (f < best) best = f, ba = a, bb = b;
    }
  CHECK(ba == 95);
  CHECK(bb == 10);
}

TEST_CASE("loss-based estimate is symmetric on one video") {
  MeanLengths m = EstimateLossBased(SetCorpus({{120, {0, 1, 2}}}, 3), 1);
  for (double l : m.lambda) CHECK(l == doctest::Approx(40).epsilon(1e-6));
}

TEST_CASE("interior optimum equals the least-squares solution") {
  // Full-column-rank membership matrix with a positive solution.
  std::vector<std::pair<int64_t, ActionSet>> videos = {
      {300, {0, 1, 2}}, {210, {0, 1}}, {260, {1, 2}}, {170, {0}},
      {400, {0, 1, 2}}, {90, {2}},     {250, {0, 2}}};
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(videos.size(), 3);
  Eigen::VectorXd T(videos.size());
  for (size_t i = 0; i < videos.size(); i++) {
    for (ClassId c : videos[i].second) M(i, c) = 1;
    T(i) = videos[i].first;
  }
  Eigen::VectorXd ls = M.householderQr().solve(T);
  REQUIRE(ls.minCoeff() > 5);
  MeanLengths m = EstimateLossBased(SetCorpus(videos, 3), 1);
  for (int c = 0; c < 3; c++) CHECK(m.lambda[c] == doctest::Approx(ls(c)).epsilon(1e-7));
}

TEST_CASE("loss-based estimate never loses to the projected naive start") {
  RandomEngine rng(4);
  std::uniform_int_distribution<int64_t> T(40, 600);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 40; trial++) {
    const int C = 2 + trial % 4;
    std::vector<std::pair<int64_t, ActionSet>> videos;
    for (int i = 0; i < 2 + trial % 7; i++) {
      ActionSet s;
      for (ClassId c = 0; c < C; c++)
        if (coin(rng)) s.insert(c);
      if (s.empty()) s.insert(i % C);
      videos.push_back({T(rng), s});
    }
    for (ClassId c = 0; c < C; c++) videos.push_back({T(rng), {c}});
    Corpus corpus = SetCorpus(videos, C);
    const double l_min = 25;
    MeanLengths m = EstimateLossBased(corpus, l_min);
    std::vector<double> start = EstimateNaive(corpus).lambda;
    for (double &x : start) x = std::max(x, l_min);
    for (double x : m.lambda) CHECK(x >= l_min);
    CHECK(Objective(videos, m.lambda) <= Objective(videos, start) + 1e-6);
    CHECK(CoupledLengthLoss(corpus, m.lambda) ==
          doctest::Approx(Objective(videos, m.lambda)));
  }
}

TEST_CASE("decoupled estimate is the per-class mean video length") {
  MeanLengths m = EstimateLossBasedDecoupled(
      SetCorpus({{100, {0, 1}}, {300, {0}}, {20, {1}}}, 2), 50);
  CHECK(m.lambda[0] == doctest::Approx(200));
  CHECK(m.lambda[1] == doctest::Approx(60));
}

TEST_CASE("log pmf closed forms") {
  LengthModel p(LengthKind::kPoisson, {1.0}, {});
  CHECK(p.LogPmf(0, 1) == doctest::Approx(-1.0));
  LengthModel box(LengthKind::kBox, {10.0}, {2.0});
  CHECK(box.LogPmf(0, 13) == kLogZero);
  CHECK(box.LogPmf(0, 12) == doctest::Approx(-std::log(5.0)));
  CHECK(box.LogPmf(0, 8) == doctest::Approx(-std::log(5.0)));
  CHECK(box.LogPmf(0, 7) == kLogZero);
  LengthModel tri(LengthKind::kTriangle, {10.0}, {2.0});
  // weights 0.5, 1, 0.5 on 9, 10, 11
  CHECK(tri.LogPmf(0, 10) == doctest::Approx(std::log(0.5)));
  CHECK(tri.LogPmf(0, 11) == doctest::Approx(std::log(0.25)));
  CHECK(tri.LogPmf(0, 12) == kLogZero);
}

TEST_CASE("Poisson sums to one") {
  LengthModel p(LengthKind::kPoisson, {40.0}, {});
  double s = 0;
  for (int l = 0; l <= 400; l++) s += std::exp(p.LogPmf(0, l));
  CHECK(std::abs(s - 1.0) < 1e-9);
}

TEST_CASE("every kind normalizes over its truncated support") {
  RandomEngine rng(8);
  std::uniform_real_distribution<double> mu(3, 250), sd(0.6, 60);
  for (int trial = 0; trial < 20; trial++) {
    std::vector<double> lambda = {mu(rng), mu(rng)};
    std::vector<double> sigma = {sd(rng), sd(rng)};
    for (LengthKind k : {LengthKind::kPoisson, LengthKind::kGaussian,
                         LengthKind::kBox, LengthKind::kTriangle}) {
      LengthModel m(k, lambda, sigma);
      for (ClassId c = 0; c < 2; c++) {
        // Poisson has unbounded support; sum far past L_max.
        int64_t end = k == LengthKind::kPoisson ? 20 * m.MaxLength() : m.MaxLength();
        double s = 0;
        for (int64_t l = k == LengthKind::kPoisson ? 0 : 1; l <= end; l++)
          s += std::exp(m.LogPmf(c, l));
        CHECK(std::abs(s - 1.0) <= 1e-6);
        CHECK(m.LogPmf(c, m.MaxLength() + 1) ==
              (k == LengthKind::kPoisson ? m.LogPmf(c, m.MaxLength() + 1) : kLogZero));
      }
    }
  }
}

TEST_CASE("Poisson mode") {
  for (double lambda : {1.0, 5.0, 40.0, 200.0, 7.3, 63.9}) {
    LengthModel p(LengthKind::kPoisson, {lambda}, {});
    int64_t arg = 0;
    for (int64_t l = 1; l <= 1000; l++)
      if (p.LogPmf(0, l) > p.LogPmf(0, arg)) arg = l;
    CHECK((arg == std::floor(lambda) || arg == std::ceil(lambda) - 1));
  }
}

TEST_CASE("default maximum length") {
  LengthModel p(LengthKind::kPoisson, {100.0, 16.0}, {});
  CHECK(p.MaxLength() == 150);
  LengthModel g(LengthKind::kGaussian, {100.0, 16.0}, {3.0, 30.0});
  CHECK(g.MaxLength() == 166);
}

TEST_CASE("sigma heuristic") {
  // Class 1 is allocated 30 and 50 frames; class 2 always 40.
  Corpus corpus = SetCorpus({{30, {1}}, {50, {1}}, {80, {1, 2}}, {40, {2}}}, 3);
  std::vector<double> lambda = {10, 40, 40};
  std::vector<SampledSequence> samples = {{{1}, 0}, {{1}, 1}, {{2}, 3}, {{2, 2}, 2}};
  SigmaEstimate s = EstimateSigma(corpus, samples, lambda, 15);
  CHECK(s.sigma[1] == 15);  // sd = 14.14 is below the floor
  CHECK(!s.floored[1]);
  CHECK(s.sigma[2] == 15);
  CHECK(s.sigma[0] == 15);
  CHECK(s.floored[0]);

  std::vector<SampledSequence> wide = {{{1}, 0}, {{1}, 1}, {{1, 1}, 2}};
  // allocations 30, 50, 40, 40: sd = sqrt(200/3)
  s = EstimateSigma(corpus, wide, lambda, 5);
  CHECK(s.sigma[1] == doctest::Approx(std::sqrt(200.0 / 3)));
}

TEST_CASE("length model files") {
  TempDir dir;
  ClassTable t({"background", "a"}, 0);
  LengthModel m(LengthKind::kTriangle, {120.5, 33.25}, {20, 15});
  WriteLengthModel(m, t, dir / "l.txt");
  LengthModel back = ReadLengthModel(dir / "l.txt", t);
  CHECK(back.kind() == LengthKind::kTriangle);
  CHECK(back.Means() == m.Means());
  CHECK(back.Sigmas() == m.Sigmas());
  CHECK(back.MaxLength() == m.MaxLength());

  WriteFile(dir / "means.txt", "a 12.5\nbackground 40\n");
  CHECK(ReadMeanLengths(dir / "means.txt", t) == std::vector<double>{40, 12.5});
  WriteFile(dir / "bad.txt", "poisson\nzebra 3 0\n");
  CHECK_THROWS_AS(ReadLengthModel(dir / "bad.txt", t), ParseError);
  CHECK_THROWS_AS(ParseLengthKind("cauchy"), ConfigError);
}

}  // namespace
}  // namespace actset

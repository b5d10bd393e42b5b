// test_eval.cc

// Copyright 2026  The classaug Authors

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

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "json.hpp"

#include "classaug/errors.h"
#include "classaug/eval.h"
#include "oracles.h"
#include "test_util.h"

using namespace classaug;

namespace {

ScoredTrials Make(std::vector<double> tar, std::vector<double> non) {
  ScoredTrials st;
  for (double s : tar) {
    st.scores.push_back(s);
    st.labels.push_back(true);
  }
  for (double s : non) {
    st.scores.push_back(s);
    st.labels.push_back(false);
  }
  return st;
}

}  // namespace

TEST_CASE("cosine trial scores") {
  Vector a(2), b(2), c(2);
  a << 1, 0;
  b << -1, 0;
  c << 1, 1;
  CHECK(CosineScore(a, a) == doctest::Approx(1.0));
  CHECK(CosineScore(a, b) == doctest::Approx(-1.0));
  CHECK(CosineScore(a, c) == doctest::Approx(0.70711).epsilon(1e-5));

  std::map<std::string, Vector> emb{{"a", a}, {"b", b}, {"c", c}};
  TrialList trials;
  trials.trials = {{true, "a", "a"}, {false, "a", "b"}, {false, "c", "a"}};
  ScoredTrials st = ScoreTrials(trials, emb);
  CHECK(st.labels == std::vector<bool>{true, false, false});
  CHECK(st.scores[2] == doctest::Approx(0.70711).epsilon(1e-5));
  trials.trials.push_back({true, "a", "zz"});
  try {
    ScoreTrials(trials, emb);
    FAIL("expected MissingUtteranceError");
  } catch (const MissingUtteranceError &e) {
    CHECK(e.id() == "zz");
  }
}

TEST_CASE("equal error rate examples") {
  CHECK(ComputeEer(Make({0.9, 0.8}, {0.7, 0.1})).eer == 0.0);
  CHECK(ComputeEer(Make({0.9, 0.4}, {0.6, 0.1})).eer == 0.5);
  CHECK(ComputeEer(Make({0.1, 0.2}, {0.7, 0.9})).eer == 1.0);
  CHECK(ComputeMinDcf(Make({0.9, 0.8}, {0.7, 0.1}), 0.01, 1, 1) == 0.0);
  CHECK(ComputeMinDcf(Make({0.2}, {0.8}), 0.5, 1, 1) == 1.0);
  CHECK_THROWS_AS(ComputeEer(Make({0.1, 0.2}, {})), DegenerateTrialsError);
  CHECK_THROWS_AS(ComputeMinDcf(Make({}, {0.3}), 0.01, 1, 1), DegenerateTrialsError);
}

TEST_CASE("interpolated crossing") {
  // Three targets, two nontargets: FAR steps by 1/2 and FRR by 1/3.
  ScoredTrials st = Make({0.9, 0.5, 0.3}, {0.6, 0.2});
  EerResult r = ComputeEer(st);
  CHECK(r.eer == oracle::Eer(st.scores, st.labels));
  CHECK(r.eer > 0.0);
  CHECK(r.eer < 1.0);
  CHECK(r.eer == 0.5);
  CHECK(r.threshold == 0.5);
}

TEST_CASE("100-trial instance against the threshold sweep") {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    ScoredTrials st;
    for (int i = 0; i < 100; ++i) {
      const bool tar = rng.Uniform() < 0.3;
      // Rounded scores create ties on purpose.
      st.scores.push_back(std::round((rng.Normal() + (tar ? 1.0 : 0.0)) * 20) / 20);
      st.labels.push_back(tar);
    }
    REQUIRE(ComputeEer(st).eer == oracle::Eer(st.scores, st.labels));
    REQUIRE(ComputeMinDcf(st, 0.01, 1, 1) == oracle::MinDcf(st.scores, st.labels, 0.01, 1, 1));
    REQUIRE(ComputeMinDcf(st, 0.05, 10, 1) == oracle::MinDcf(st.scores, st.labels, 0.05, 10, 1));
  }
}

TEST_CASE("metrics ignore monotone transforms and stay in range") {
  Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    ScoredTrials st = Make({}, {});
    for (int i = 0; i < 12; ++i) {
      st.scores.push_back(rng.Normal());
      st.labels.push_back(i % 3 == 0);
    }
    ScoredTrials affine = st, cubic = st;
    for (double &s : affine.scores) s = 3 * s - 7;
    for (double &s : cubic.scores) s = s * s * s + s;
    const double eer = ComputeEer(st).eer, dcf = ComputeMinDcf(st, 0.01, 1, 1);
    CHECK(std::abs(ComputeEer(affine).eer - eer) <= 1e-12);
    CHECK(std::abs(ComputeEer(cubic).eer - eer) <= 1e-12);
    CHECK(std::abs(ComputeMinDcf(cubic, 0.01, 1, 1) - dcf) <= 1e-12);
    CHECK(eer >= 0.0);
    CHECK(eer <= 1.0);
    CHECK(dcf >= 0.0);
    CHECK(dcf <= 1.0);
  }
}

TEST_CASE("identification accuracy") {
  Matrix l = Matrix::Identity(3, 3);
  std::vector<int> right{0, 1, 2}, wrong{1, 2, 0}, mixed{0, 1, 0};
  CHECK(IdentificationAccuracy(l, right) == 1.0);
  CHECK(IdentificationAccuracy(l, wrong) == 0.0);
  CHECK(IdentificationAccuracy(l, mixed) == doctest::Approx(2.0 / 3.0));
  Matrix tie = Matrix::Ones(1, 3);
  std::vector<int> zero{0}, one{1};
  CHECK(IdentificationAccuracy(tie, zero) == 1.0);
  CHECK(IdentificationAccuracy(tie, one) == 0.0);
  CHECK_THROWS_AS(IdentificationAccuracy(l, zero), DimensionError);
}

TEST_CASE("score file and summary") {
  TrialList trials;
  trials.trials = {{true, "a", "b"}, {false, "a", "c"}};
  ScoredTrials st = Make({0.1 + 0.2}, {-1.0 / 3});
  const std::string dir = testing::TempDir("scores");
  WriteScoreFile(dir + "/s.txt", trials, st);
  std::ifstream in(dir + "/s.txt");
  std::string e, t;
  double s;
  int label;
  in >> e >> t >> s >> label;
  CHECK(e == "a");
  CHECK(t == "b");
  CHECK(s == 0.1 + 0.2);
  CHECK(label == 1);
  in >> e >> t >> s >> label;
  CHECK(s == -1.0 / 3);
  CHECK(label == 0);
  std::filesystem::remove_all(dir);

  EvalSummary sum = Summarize(st, 0.01, 1, 1);
  auto j = nlohmann::json::parse(sum.ToJson());
  for (const char *key : {"eer", "mindcf", "threshold", "num_targets", "num_nontargets"})
    CHECK(j.contains(key));
  CHECK(j["num_targets"] == 1);
  CHECK(j["eer"] == 0.0);
}

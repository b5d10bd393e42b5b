// eval.cc

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

#include "classaug/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "classaug/errors.h"

namespace classaug {

int ScoredTrials::NumTargets() const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), true));
}

int ScoredTrials::NumNontargets() const {
  return static_cast<int>(labels.size()) - NumTargets();
}

void ScoredTrials::Validate() const {
  if (scores.size() != labels.size())
    throw ValidationError("scores", "length differs from labels");
  for (double s : scores)
    if (!std::isfinite(s)) throw ValidationError("scores", "non-finite score");
}

double CosineScore(const Vector &a, const Vector &b) {
  if (a.size() != b.size())
    throw DimensionError("cosine score of vectors of different sizes");
  const double na = a.norm(), nb = b.norm();
  if (na < 1e-12 || nb < 1e-12)
    throw DegenerateError("cosine score of a zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

ScoredTrials ScoreTrials(const TrialList &trials,
                         const std::map<std::string, Vector> &embeddings) {
  ScoredTrials st;
  st.scores.reserve(trials.trials.size());
  for (const Trial &t : trials.trials) {
    auto e = embeddings.find(t.enroll_id);
    if (e == embeddings.end()) throw MissingUtteranceError(t.enroll_id);
    auto s = embeddings.find(t.test_id);
    if (s == embeddings.end()) throw MissingUtteranceError(t.test_id);
    st.scores.push_back(CosineScore(e->second, s->second));
    st.labels.push_back(t.is_target);
  }
  return st;
}

std::vector<RocPoint> RocPoints(const ScoredTrials &st) {
  st.Validate();
  const int n_tar = st.NumTargets(), n_non = st.NumNontargets();
  if (n_tar == 0 || n_non == 0)
    throw DegenerateTrialsError(
        "trial list needs at least one target and one nontarget");
  std::vector<size_t> order(st.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return st.scores[a] > st.scores[b];
  });
  std::vector<RocPoint> points;
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  int accepted_tar = 0, accepted_non = 0;
  for (size_t i = 0; i < order.size();) {
    const double threshold = st.scores[order[i]];
    for (; i < order.size() && st.scores[order[i]] == threshold; ++i)
      (st.labels[order[i]] ? accepted_tar : accepted_non)++;
    points.push_back({threshold, static_cast<double>(accepted_non) / n_non,
                      static_cast<double>(n_tar - accepted_tar) / n_tar});
  }
  return points;
}

EerResult ComputeEer(const ScoredTrials &st) {
  std::vector<RocPoint> points = RocPoints(st);
  // The last point accepts everything (FAR 1, FRR 0), so a crossing exists.
  size_t k = 0;
  while (points[k].far < points[k].frr) ++k;
  EerResult r;
  r.threshold = points[k].threshold;
  if (points[k].far == points[k].frr) {
    r.eer = points[k].far;
    return r;
  }
  const RocPoint &a = points[k - 1], &b = points[k];
  const double da = a.far - a.frr, db = b.far - b.frr;
  const double t = -da / (db - da);
  r.eer = a.far + t * (b.far - a.far);
  return r;
}

double ComputeMinDcf(const ScoredTrials &st, double p_target, double c_miss,
                     double c_fa) {
  std::vector<RocPoint> points = RocPoints(st);
  const double norm = std::min(c_miss * p_target, c_fa * (1.0 - p_target));
  double best = std::numeric_limits<double>::infinity();
  for (const RocPoint &p : points)
    best = std::min(best, (c_miss * p.frr * p_target +
                           c_fa * p.far * (1.0 - p_target)) / norm);
  return best;
}

double IdentificationAccuracy(const Matrix &logits,
                              std::span<const int> targets) {
  if (logits.rows() == 0 ||
      static_cast<size_t>(logits.rows()) != targets.size())
    throw DimensionError("identification accuracy: rows and targets differ");
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < logits.cols(); ++j)
      if (logits(i, j) > logits(i, best)) best = j;
    if (best == targets[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

void WriteScoreFile(const std::string &path, const TrialList &trials,
                    const ScoredTrials &st) {
  if (trials.trials.size() != st.scores.size())
    throw DimensionError("score file: trial and score counts differ");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  for (size_t i = 0; i < st.scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", st.scores[i]);
    out << trials.trials[i].enroll_id << ' ' << trials.trials[i].test_id << ' '
        << buf << ' ' << (st.labels[i] ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::string EvalSummary::ToJson() const {
  nlohmann::ordered_json j;
  j["eer"] = eer;
  j["mindcf"] = mindcf;
  j["threshold"] = threshold;
  j["num_targets"] = num_targets;
  j["num_nontargets"] = num_nontargets;
  return j.dump();
}

EvalSummary Summarize(const ScoredTrials &st, double p_target, double c_miss,
                      double c_fa) {
  EvalSummary s;
  EerResult eer = ComputeEer(st);
  s.eer = eer.eer;
  s.threshold = eer.threshold;
  s.mindcf = ComputeMinDcf(st, p_target, c_miss, c_fa);
  s.num_targets = st.NumTargets();
  s.num_nontargets = st.NumNontargets();
  return s;
}

}  // namespace classaug

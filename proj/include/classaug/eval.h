// classaug/eval.h

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

#ifndef CLASSAUG_EVAL_H_
#define CLASSAUG_EVAL_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "classaug/types.h"

namespace classaug {

struct ScoredTrials {
  std::vector<double> scores;
  std::vector<bool> labels;  // true for target trials

  int NumTargets() const;
  int NumNontargets() const;
  /// Equal lengths and finite scores; throws ValidationError.
  void Validate() const;
};

double CosineScore(const Vector &a, const Vector &b);

/// Cosine score of every trial. Throws MissingUtteranceError for the first
/// id absent from the map.
ScoredTrials ScoreTrials(const TrialList &trials,
                         const std::map<std::string, Vector> &embeddings);

/// One operating point of the threshold sweep; a trial is accepted when
/// its score is >= threshold.
struct RocPoint {
  double threshold;
  double far;  // nontargets accepted / nontargets
  double frr;  // targets rejected / targets
};

/// Operating points for threshold +inf followed by every distinct score in
/// descending order. Throws DegenerateTrialsError without at least one
/// target and one nontarget.
std::vector<RocPoint> RocPoints(const ScoredTrials &st);

struct EerResult {
  double eer = 0.0;
  /// Threshold of the first operating point with FAR >= FRR.
  double threshold = 0.0;
};

/// Equal error rate. When no operating point has FAR == FRR the value is
/// interpolated linearly in FAR - FRR between the two points that bracket
/// the crossing.
EerResult ComputeEer(const ScoredTrials &st);

/// Normalized minimum detection cost over the same operating points.
double ComputeMinDcf(const ScoredTrials &st, double p_target, double c_miss,
                     double c_fa);

/// Fraction of rows whose argmax (lowest index on ties) equals the target.
double IdentificationAccuracy(const Matrix &logits,
                              std::span<const int> targets);

/// "<enroll> <test> <score> <label>" per line, scores printed with 17
/// significant digits.
void WriteScoreFile(const std::string &path, const TrialList &trials,
                    const ScoredTrials &st);

struct EvalSummary {
  double eer = 0.0;
  double mindcf = 0.0;
  double threshold = 0.0;
  int num_targets = 0;
  int num_nontargets = 0;

  std::string ToJson() const;
};

EvalSummary Summarize(const ScoredTrials &st, double p_target, double c_miss,
                      double c_fa);

}  // namespace classaug

#endif  // CLASSAUG_EVAL_H_

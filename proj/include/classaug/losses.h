// classaug/losses.h

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

#ifndef CLASSAUG_LOSSES_H_
#define CLASSAUG_LOSSES_H_

#include <span>

#include "classaug/autograd.h"
#include "classaug/config.h"
#include "classaug/types.h"

namespace classaug {

/// Probabilities entering a BCE term are clamped to [kProbClamp,
/// 1 - kProbClamp].
inline constexpr double kProbClamp = 1e-7;
/// Floor applied to the generator loss before dividing by it.
inline constexpr double kGeneratorLossFloor = 1e-8;

/// Per-step values of every objective, as written to the metrics log.
struct LossReport {
  double l_real = 0.0;
  double l_syn = 0.0;
  double l_d = 0.0;
  double l_g = 0.0;
  double l_total = 0.0;
  double lambda_adv = 0.0;
  double ratio_ema = 0.0;

  bool AllFinite() const;
  /// |l_total - (l_real + weight * l_syn + lambda_adv * l_g)|.
  double CompositionError(double syn_weight) const;
};

/// Mean additive-margin softmax cross-entropy. The margined target logit
/// also appears in the normalizer. If grad is given it receives
/// d loss / d logits. Throws IndexError for targets outside [0, C) and
/// DimensionError when the row count differs from the target count.
double AmSoftmax(const Matrix &logits, std::span<const int> targets,
                 double scale, double margin, Matrix *grad = nullptr);

/// Binary cross-entropy with the probability clamped first.
double Bce(double p, int target);
/// d Bce / d p; zero where the clamp is active.
double BceGrad(double p, int target);

/// mean BCE(d_real, 1) + mean BCE(d_syn, 0).
double DiscriminatorLoss(const Vector &d_real, const Vector &d_syn);
/// mean BCE(d_syn, 1) + mean BCE(d_real, 0). Without the real term only
/// the first mean remains.
double GeneratorLoss(const Vector &d_real, const Vector &d_syn,
                     bool real_term = true);

/// AM-Softmax over cosine(e_syn, [W | W_syn]) where W_syn holds one column
/// per synthetic class and each row targets its own class. With
/// against_real false the real columns are left out.
double SyntheticLoss(const SyntheticBatch &syn,
                     const ClassifierWeights &weights, double scale,
                     double margin, bool against_real = true);

/// The [d x K] matrix of distinct synthetic class anchors, in label order.
Matrix UniqueSyntheticWeights(const SyntheticBatch &syn);

struct LambdaRule {
  double base = 0.1;
  double min = 0.01;
  double max = 1.0;
  double beta = 0.9;

  static LambdaRule FromConfig(const ExperimentConfig &cfg);
};

struct LambdaUpdate {
  double lambda_adv;
  double ratio_ema;
};

/// ratio_ema' = beta * ratio_ema + (1 - beta) * l_real / max(l_g, 1e-8);
/// lambda_adv = clip(base * ratio_ema', min, max).
LambdaUpdate AdaptLambda(double l_real, double l_g, double ratio_ema,
                         const LambdaRule &rule);

/// l_real + l_syn / lambda + lambda_adv * l_g.
double TotalLoss(double l_real, double l_syn, double l_g, double lambda_adv,
                 double lambda);

namespace nn {

/// Graph versions; each returns a 1x1 node.
Var AmSoftmaxLoss(const Var &logits, std::span<const int> targets,
                  double scale, double margin);
/// Mean clamped BCE of a column of probabilities against a fixed target.
Var MeanBce(const Var &probs, int target);
Var DiscriminatorLoss(const Var &d_real, const Var &d_syn);
Var GeneratorLoss(const Var &d_real, const Var &d_syn, bool real_term = true);
/// e_syn [B' x d], weights [d x C], syn_weights [d x K]; targets are the
/// synthetic labels of the rows (C + registry position).
Var SyntheticLoss(const Var &e_syn, const Var &weights,
                  const Var &syn_weights, std::span<const int> targets,
                  int num_real_classes, double scale, double margin,
                  bool against_real = true);

}  // namespace nn

}  // namespace classaug

#endif  // CLASSAUG_LOSSES_H_

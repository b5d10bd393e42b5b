// losses.cc

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

#include "classaug/losses.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "classaug/encoder.h"
#include "classaug/errors.h"

namespace classaug {

bool LossReport::AllFinite() const {
  return std::isfinite(l_real) && std::isfinite(l_syn) &&
         std::isfinite(l_d) && std::isfinite(l_g) && std::isfinite(l_total) &&
         std::isfinite(lambda_adv) && std::isfinite(ratio_ema);
}

double LossReport::CompositionError(double syn_weight) const {
  return std::abs(l_total - (l_real + syn_weight * l_syn + lambda_adv * l_g));
}

double AmSoftmax(const Matrix &logits, std::span<const int> targets,
                 double scale, double margin, Matrix *grad) {
  const Eigen::Index n = logits.rows(), c = logits.cols();
  if (static_cast<Eigen::Index>(targets.size()) != n)
    throw DimensionError("am-softmax: " + std::to_string(n) + " rows but " +
                         std::to_string(targets.size()) + " targets");
  if (n == 0) throw DimensionError("am-softmax: empty batch");
  for (int t : targets)
    if (t < 0 || t >= c)
      throw IndexError("am-softmax target " + std::to_string(t) +
                       " outside [0, " + std::to_string(c) + ")");
  if (grad) grad->resize(n, c);
  double total = 0.0;
  RowVector z(c);
  for (Eigen::Index i = 0; i < n; ++i) {
    z = scale * logits.row(i);
    z(targets[i]) -= scale * margin;
    const double zmax = z.maxCoeff();
    RowVector ez = (z.array() - zmax).exp().matrix();
    const double sum = ez.sum();
    total += zmax + std::log(sum) - z(targets[i]);
    if (grad) {
      grad->row(i) = ez / sum;
      (*grad)(i, targets[i]) -= 1.0;
    }
  }
  if (grad) *grad *= scale / static_cast<double>(n);
  return total / static_cast<double>(n);
}

namespace {

double ClampProb(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double MeanBceOf(const Vector &p, int target) {
  if (p.size() == 0) throw DimensionError("bce over an empty batch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) s += Bce(p(i), target);
  return s / static_cast<double>(p.size());
}

}  // namespace

double Bce(double p, int target) {
  const double q = ClampProb(p);
  return target ? -std::log(q) : -std::log(1.0 - q);
}

double BceGrad(double p, int target) {
  if (p < kProbClamp || p > 1.0 - kProbClamp) return 0.0;
  return target ? -1.0 / p : 1.0 / (1.0 - p);
}

double DiscriminatorLoss(const Vector &d_real, const Vector &d_syn) {
  return MeanBceOf(d_real, 1) + MeanBceOf(d_syn, 0);
}

double GeneratorLoss(const Vector &d_real, const Vector &d_syn,
                     bool real_term) {
  double l = MeanBceOf(d_syn, 1);
  if (real_term) l += MeanBceOf(d_real, 0);
  return l;
}

Matrix UniqueSyntheticWeights(const SyntheticBatch &syn) {
  const int k = syn.NumSyntheticClasses();
  Matrix out(syn.weights.rows(), k);
  std::vector<bool> seen(k, false);
  for (int i = 0; i < syn.Size(); ++i) {
    const int cls = syn.labels[i] - syn.num_real_classes;
    if (cls < 0 || cls >= k)
      throw IndexError("synthetic label " + std::to_string(syn.labels[i]) +
                       " outside the batch registry");
    if (!seen[cls]) {
      out.col(cls) = syn.weights.col(i);
      seen[cls] = true;
    }
  }
  return out;
}

double SyntheticLoss(const SyntheticBatch &syn,
                     const ClassifierWeights &weights, double scale,
                     double margin, bool against_real) {
  Matrix unique = UniqueSyntheticWeights(syn);
  std::vector<int> targets(syn.labels);
  ClassifierWeights columns;
  if (against_real) {
    columns.w.resize(weights.Dim(), weights.NumClasses() + unique.cols());
    columns.w << weights.w, unique;
  } else {
    columns.w = unique;
    for (int &t : targets) t -= syn.num_real_classes;
  }
  return AmSoftmax(CosineLogits(syn.embeddings, columns), targets, scale,
                   margin);
}

LambdaRule LambdaRule::FromConfig(const ExperimentConfig &cfg) {
  return {cfg.lambda_adv_base, cfg.lambda_adv_bounds.first,
          cfg.lambda_adv_bounds.second, cfg.ema_beta};
}

LambdaUpdate AdaptLambda(double l_real, double l_g, double ratio_ema,
                         const LambdaRule &rule) {
  const double ratio = l_real / std::max(l_g, kGeneratorLossFloor);
  LambdaUpdate u;
  u.ratio_ema = rule.beta * ratio_ema + (1.0 - rule.beta) * ratio;
  u.lambda_adv = std::clamp(rule.base * u.ratio_ema, rule.min, rule.max);
  return u;
}

double TotalLoss(double l_real, double l_syn, double l_g, double lambda_adv,
                 double lambda) {
  return l_real + l_syn / lambda + lambda_adv * l_g;
}

namespace nn {

Var AmSoftmaxLoss(const Var &logits, std::span<const int> targets,
                  double scale, double margin) {
  Matrix grad;
  const double value =
      AmSoftmax(logits.value(), targets, scale, margin, &grad);
  Graph &g = *logits.graph();
  const int in = logits.id();
  return g.Emit(Matrix::Constant(1, 1, value), {logits},
                [in, grad](Graph &g, int self) {
                  if (g.requires_grad(in))
                    g.MutableGrad(in) += g.grad(self)(0, 0) * grad;
                });
}

Var MeanBce(const Var &probs, int target) {
  const Matrix &p = probs.value();
  if (p.cols() != 1 || p.rows() == 0)
    throw DimensionError("bce expects a nonempty column of probabilities");
  const double n = static_cast<double>(p.rows());
  double value = 0.0;
  Matrix grad(p.rows(), 1);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    value += Bce(p(i, 0), target);
    grad(i, 0) = BceGrad(p(i, 0), target) / n;
  }
  Graph &g = *probs.graph();
  const int in = probs.id();
  return g.Emit(Matrix::Constant(1, 1, value / n), {probs},
                [in, grad](Graph &g, int self) {
                  if (g.requires_grad(in))
                    g.MutableGrad(in) += g.grad(self)(0, 0) * grad;
                });
}

Var DiscriminatorLoss(const Var &d_real, const Var &d_syn) {
  return Add(MeanBce(d_real, 1), MeanBce(d_syn, 0));
}

Var GeneratorLoss(const Var &d_real, const Var &d_syn, bool real_term) {
  Var l = MeanBce(d_syn, 1);
  return real_term ? Add(l, MeanBce(d_real, 0)) : l;
}

Var SyntheticLoss(const Var &e_syn, const Var &weights,
                  const Var &syn_weights, std::span<const int> targets,
                  int num_real_classes, double scale, double margin,
                  bool against_real) {
  if (against_real) {
    Var parts[] = {weights, syn_weights};
    return AmSoftmaxLoss(CosineLogits(e_syn, ConcatCols(parts)), targets,
                         scale, margin);
  }
  std::vector<int> local(targets.begin(), targets.end());
  for (int &t : local) t -= num_real_classes;
  return AmSoftmaxLoss(CosineLogits(e_syn, syn_weights), local, scale,
                       margin);
}

}  // namespace nn

}  // namespace classaug

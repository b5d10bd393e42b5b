// optim.cc

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

#include "classaug/optim.h"

#include <cmath>

#include "classaug/errors.h"

namespace classaug {
namespace nn {

AdamW::AdamW(std::vector<Parameter *> params, Options options)
    : params_(std::move(params)), options_(options) {
  for (Parameter *p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamW::Rebind(std::vector<Parameter *> params) {
  if (params.size() != params_.size())
    throw DimensionError("AdamW::Rebind: parameter count changed");
  for (size_t i = 0; i < params.size(); ++i)
    if (params[i]->value.rows() != m_[i].rows() ||
        params[i]->value.cols() != m_[i].cols())
      throw DimensionError("AdamW::Rebind: shape of " + params[i]->name +
                           " changed");
  params_ = std::move(params);
}

void AdamW::Step(double lr) {
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter &p = *params_[i];
    if (options_.weight_decay != 0.0)
      p.value *= 1.0 - lr * options_.weight_decay;
    m_[i] = b1 * m_[i] + (1.0 - b1) * p.grad;
    v_[i] = b2 * v_[i] + (1.0 - b2) * p.grad.cwiseAbs2();
    p.value.array() -= lr * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + options_.eps);
  }
}

void AdamW::ZeroGrad() {
  for (Parameter *p : params_) p->ZeroGrad();
}

double ClipGradNorm(const std::vector<Parameter *> &params, double max_norm) {
  double sq = 0.0;
  for (const Parameter *p : params) sq += p->grad.squaredNorm();
  double norm = std::sqrt(sq);
  if (norm > max_norm) {
    double factor = max_norm / (norm + 1e-12);
    for (Parameter *p : params) p->grad *= factor;
  }
  return norm;
}

double WarmupLr(double base, int64_t step, int warmup) {
  if (warmup <= 0 || step >= warmup) return base;
  return base * static_cast<double>(step) / warmup;
}

}  // namespace nn
}  // namespace classaug

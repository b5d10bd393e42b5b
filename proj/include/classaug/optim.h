// classaug/optim.h

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

#ifndef CLASSAUG_OPTIM_H_
#define CLASSAUG_OPTIM_H_

#include <cstdint>
#include <vector>

#include "classaug/autograd.h"

namespace classaug {
namespace nn {

/// Adam with decoupled weight decay.
class AdamW {
 public:
  struct Options {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
  };

  AdamW() = default;
  AdamW(std::vector<Parameter *> params, Options options);

  /// Applies one update with the gradients currently held by the
  /// parameters.
  void Step(double lr);
  void ZeroGrad();

  /// Points the optimizer at a new set of parameters with the same shapes
  /// (after the owning model was moved or reloaded).
  void Rebind(std::vector<Parameter *> params);

  int64_t steps() const { return steps_; }
  void set_steps(int64_t steps) { steps_ = steps; }
  const std::vector<Parameter *> &params() const { return params_; }
  std::vector<Matrix> &first_moments() { return m_; }
  std::vector<Matrix> &second_moments() { return v_; }
  const std::vector<Matrix> &first_moments() const { return m_; }
  const std::vector<Matrix> &second_moments() const { return v_; }
  const Options &options() const { return options_; }

 private:
  std::vector<Parameter *> params_;
  Options options_;
  std::vector<Matrix> m_, v_;
  int64_t steps_ = 0;
};

/// Scales gradients so their global L2 norm is at most max_norm. Returns
/// the norm before clipping.
double ClipGradNorm(const std::vector<Parameter *> &params, double max_norm);

/// Linear warmup: base * step / warmup for step < warmup, else base.
/// `step` counts from 1 for the first update.
double WarmupLr(double base, int64_t step, int warmup);

}  // namespace nn
}  // namespace classaug

#endif  // CLASSAUG_OPTIM_H_

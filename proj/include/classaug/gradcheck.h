// classaug/gradcheck.h

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

#ifndef CLASSAUG_GRADCHECK_H_
#define CLASSAUG_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "classaug/autograd.h"

namespace classaug {
namespace nn {

struct GradCheckResult {
  /// |analytic - numeric| / max(|analytic|, |numeric|) over all entries
  /// (Frobenius norms), or the absolute difference when both are tiny.
  double relative_error = 0.0;
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
  std::string worst_input;
};

/// Compares Backward with central differences of step h for a scalar
/// function of several input matrices.
GradCheckResult CheckInputGradients(
    const std::function<Var(Graph &, const std::vector<Var> &)> &f,
    const std::vector<Matrix> &inputs, double h = 1e-6);

/// The same for a function of parameters; the parameter values are
/// restored afterwards.
GradCheckResult CheckParameterGradients(const std::function<Var(Graph &)> &f,
                                        const std::vector<Parameter *> &params,
                                        double h = 1e-6);

}  // namespace nn
}  // namespace classaug

#endif  // CLASSAUG_GRADCHECK_H_

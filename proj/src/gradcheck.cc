// gradcheck.cc

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

#include "classaug/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace classaug {
namespace nn {

namespace {

constexpr double kTinyNorm = 1e-10;

// Folds one block of analytic and numeric gradients into the result.
struct Accumulator {
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0, worst = -1.0;
  std::string worst_name;

  void Add(const std::string &name, const Matrix &analytic,
           const Matrix &numeric) {
    const double d = (analytic - numeric).squaredNorm();
    diff2 += d;
    a2 += analytic.squaredNorm();
    n2 += numeric.squaredNorm();
    if (d > worst) {
      worst = d;
      worst_name = name;
    }
  }

  GradCheckResult Finish() const {
    GradCheckResult r;
    r.analytic_norm = std::sqrt(a2);
    r.numeric_norm = std::sqrt(n2);
    const double scale = std::max(r.analytic_norm, r.numeric_norm);
    r.relative_error = scale < kTinyNorm ? std::sqrt(diff2)
                                         : std::sqrt(diff2) / scale;
    r.worst_input = worst_name;
    return r;
  }
};

}  // namespace

GradCheckResult CheckInputGradients(
    const std::function<Var(Graph &, const std::vector<Var> &)> &f,
    const std::vector<Matrix> &inputs, double h) {
  auto evaluate = [&](const std::vector<Matrix> &values) {
    Graph g;
    std::vector<Var> vars;
    for (const Matrix &m : values) vars.push_back(g.Constant(m));
    return f(g, vars).scalar();
  };
  Graph g;
  std::vector<Var> vars;
  for (const Matrix &m : inputs) vars.push_back(g.Input(m));
  g.Backward(f(g, vars));

  Accumulator acc;
  std::vector<Matrix> work = inputs;
  for (size_t k = 0; k < inputs.size(); ++k) {
    Matrix numeric(inputs[k].rows(), inputs[k].cols());
    for (Eigen::Index i = 0; i < inputs[k].size(); ++i) {
      const double x = inputs[k].data()[i];
      work[k].data()[i] = x + h;
      const double up = evaluate(work);
      work[k].data()[i] = x - h;
      const double down = evaluate(work);
      work[k].data()[i] = x;
      numeric.data()[i] = (up - down) / (2.0 * h);
    }
    Matrix analytic = g.requires_grad(vars[k])
                          ? Matrix(g.grad(vars[k].id()))
                          : Matrix::Zero(numeric.rows(), numeric.cols());
    if (analytic.size() == 0) analytic = Matrix::Zero(numeric.rows(), numeric.cols());
    acc.Add("input" + std::to_string(k), analytic, numeric);
  }
  return acc.Finish();
}

GradCheckResult CheckParameterGradients(const std::function<Var(Graph &)> &f,
                                        const std::vector<Parameter *> &params,
                                        double h) {
  for (Parameter *p : params) p->ZeroGrad();
  {
    Graph g;
    g.Backward(f(g));
  }
  auto evaluate = [&] {
    Graph g;
    return f(g).scalar();
  };
  Accumulator acc;
  for (Parameter *p : params) {
    Matrix numeric(p->value.rows(), p->value.cols());
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double x = p->value.data()[i];
      p->value.data()[i] = x + h;
      const double up = evaluate();
      p->value.data()[i] = x - h;
      const double down = evaluate();
      p->value.data()[i] = x;
      numeric.data()[i] = (up - down) / (2.0 * h);
    }
    acc.Add(p->name, p->grad, numeric);
    p->ZeroGrad();
  }
  return acc.Finish();
}

}  // namespace nn
}  // namespace classaug

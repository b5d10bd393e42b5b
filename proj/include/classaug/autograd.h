// classaug/autograd.h

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

#ifndef CLASSAUG_AUTOGRAD_H_
#define CLASSAUG_AUTOGRAD_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "classaug/rng.h"
#include "classaug/types.h"

namespace classaug {
namespace nn {

/// A named trainable matrix. Graph::Backward accumulates into grad.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)) {
    ZeroGrad();
  }
  void ZeroGrad() { grad = Matrix::Zero(value.rows(), value.cols()); }
  Eigen::Index Size() const { return value.size(); }
};

/// A named non-trainable matrix that is still part of a model's state
/// (spectral-norm power-iteration vectors, frozen weights).
struct Buffer {
  std::string name;
  Matrix *value;
};

class Graph;

/// Handle to a node of a Graph.
class Var {
 public:
  Var() = default;
  Var(Graph *graph, int id) : graph_(graph), id_(id) {}

  const Matrix &value() const;
  const Matrix &grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
  int id() const { return id_; }
  Graph *graph() const { return graph_; }

 private:
  Graph *graph_ = nullptr;
  int id_ = -1;
};

/// Tape of matrix operations. Nodes are recorded in execution order and
/// Backward() walks them in reverse. A graph is built, differentiated once
/// and thrown away.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph &, int self)>;

  /// Leaf without gradient. Used for data and for detaching values.
  Var Constant(Matrix value);
  /// Leaf with gradient, readable through Var::grad() after Backward.
  Var Input(Matrix value);
  /// Leaf bound to a parameter; Backward adds the gradient to p.grad.
  Var Param(Parameter &p);

  /// Records an op. The node needs a gradient iff any input does.
  Var Emit(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var Emit(Matrix value, std::span<const Var> inputs, BackwardFn fn);

  /// Reverse pass from a 1x1 node.
  void Backward(const Var &loss);

  const Matrix &value(int id) const { return nodes_[id].value; }
  const Matrix &grad(int id) const { return nodes_[id].grad; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  bool requires_grad(const Var &v) const { return requires_grad(v.id()); }
  /// Zero-initialized on first access.
  Matrix &MutableGrad(int id);
  int NumNodes() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter *param = nullptr;
  };
  std::vector<Node> nodes_;
};

// Linear algebra.
Var MatMul(const Var &a, const Var &b);
Var Transpose(const Var &a);
Var Add(const Var &a, const Var &b);
Var Sub(const Var &a, const Var &b);
Var Mul(const Var &a, const Var &b);
Var Scale(const Var &a, double factor);
/// a[r x c] + row[1 x c] on every row.
Var AddRowBroadcast(const Var &a, const Var &row);
/// a * s for a learnable 1x1 s.
Var ScaleByScalar(const Var &a, const Var &s);
/// x W + b.
Var Linear(const Var &x, const Var &w, const Var &b);

// Reductions and reshaping.
Var Sum(const Var &a);
Var Mean(const Var &a);
/// [T x n] -> [1 x n].
Var MeanRows(const Var &a);
Var ConcatRows(std::span<const Var> parts);
Var ConcatCols(std::span<const Var> parts);
Var SliceRows(const Var &a, int start, int count);
Var SliceCols(const Var &a, int start, int count);
Var GatherRows(const Var &a, std::span<const int> rows);
/// Row b of a becomes rows [b*times, (b+1)*times).
Var RepeatRows(const Var &a, int times);
/// a stacked `times` times.
Var TileRows(const Var &a, int times);
/// Zero-pads or truncates columns to `cols`.
Var PadOrTruncateCols(const Var &a, int cols);
/// out_i = 0.5 a[first_i] + 0.5 a[second_i].
Var MidpointRows(const Var &a, std::span<const int> first,
                 std::span<const int> second);
/// out column i = 0.5 a(:, first_i) + 0.5 a(:, second_i).
Var MidpointCols(const Var &a, std::span<const int> first,
                 std::span<const int> second);

// Elementwise nonlinearities.
Var Tanh(const Var &a);
/// Exact (erf) GELU.
Var Gelu(const Var &a);
Var LeakyRelu(const Var &a, double slope = 0.2);
Var Sigmoid(const Var &a);
/// Inverted dropout. Identity when !training or rate == 0.
Var Dropout(const Var &a, double rate, bool training, Rng &rng);

// Normalization.
/// Per-row layer normalization with affine gamma/beta [1 x n].
Var LayerNormRows(const Var &a, const Var &gamma, const Var &beta,
                  double eps = 1e-5);
Var SoftmaxRows(const Var &a);
/// Throws DegenerateError if a row (column) norm is below min_norm.
Var L2NormalizeRows(const Var &a, double min_norm = 1e-12);
Var L2NormalizeCols(const Var &a, double min_norm = 1e-12);
/// w / (u^T w v) with u, v held fixed.
Var SpectralNormalize(const Var &w, const Vector &u, const Vector &v);

// Sequence helpers.
/// [T x C] -> [T + 2 pad - k + 1 x k*C]; column block j holds frame t+j-pad.
Var Im2Col(const Var &a, int kernel, int pad);
/// Softmax over consecutive groups of `group` rows of a column vector.
Var GroupSoftmax(const Var &scores, int group);
/// out_b = sum_t alpha[b*group+t] * x[b*group+t].
Var GroupWeightedSum(const Var &alpha, const Var &x, int group);

}  // namespace nn
}  // namespace classaug

#endif  // CLASSAUG_AUTOGRAD_H_

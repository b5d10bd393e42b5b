// autograd.cc

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

#include "classaug/autograd.h"

#include <cmath>
#include <numbers>

#include "classaug/errors.h"

namespace classaug {
namespace nn {

const Matrix &Var::value() const { return graph_->value(id_); }
const Matrix &Var::grad() const { return graph_->grad(id_); }

Var Graph::Constant(Matrix value) {
  nodes_.push_back({std::move(value), Matrix(), false, nullptr, nullptr});
  return Var(this, NumNodes() - 1);
}

Var Graph::Input(Matrix value) {
  nodes_.push_back({std::move(value), Matrix(), true, nullptr, nullptr});
  return Var(this, NumNodes() - 1);
}

Var Graph::Param(Parameter &p) {
  nodes_.push_back({p.value, Matrix(), true, nullptr, &p});
  return Var(this, NumNodes() - 1);
}

Var Graph::Emit(Matrix value, std::initializer_list<Var> inputs,
                BackwardFn fn) {
  return Emit(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
              std::move(fn));
}

Var Graph::Emit(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
  bool needs = false;
  for (const Var &v : inputs) {
    if (v.graph() != this) throw Error("op mixes nodes of different graphs");
    needs = needs || nodes_[v.id()].requires_grad;
  }
  nodes_.push_back(
      {std::move(value), Matrix(), needs, needs ? std::move(fn) : nullptr,
       nullptr});
  return Var(this, NumNodes() - 1);
}

Matrix &Graph::MutableGrad(int id) {
  Node &n = nodes_[id];
  if (n.grad.size() == 0 && n.value.size() != 0)
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::Backward(const Var &loss) {
  if (loss.graph() != this || loss.rows() != 1 || loss.cols() != 1)
    throw DimensionError("Backward needs a 1x1 node of this graph");
  MutableGrad(loss.id())(0, 0) += 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node &n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

namespace {

void CheckSameShape(const Var &a, const Var &b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}

// Accumulates into an input's gradient only if it needs one.
template <typename Expr>
void Accum(Graph &g, const Var &v, const Expr &delta) {
  if (g.requires_grad(v.id())) g.MutableGrad(v.id()) += delta;
}

}  // namespace

Var MatMul(const Var &a, const Var &b) {
  if (a.cols() != b.rows())
    throw DimensionError("MatMul: inner dimensions " +
                         std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()));
  Graph &g = *a.graph();
  return g.Emit(a.value() * b.value(), {a, b}, [a, b](Graph &g, int self) {
    const Matrix &gout = g.grad(self);
    if (g.requires_grad(a)) g.MutableGrad(a.id()).noalias() += gout * b.value().transpose();
    if (g.requires_grad(b)) g.MutableGrad(b.id()).noalias() += a.value().transpose() * gout;
  });
}

Var Transpose(const Var &a) {
  Graph &g = *a.graph();
  return g.Emit(a.value().transpose(), {a}, [a](Graph &g, int self) {
    Accum(g, a, g.grad(self).transpose());
  });
}

Var Add(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Add");
  Graph &g = *a.graph();
  return g.Emit(a.value() + b.value(), {a, b}, [a, b](Graph &g, int self) {
    Accum(g, a, g.grad(self));
    Accum(g, b, g.grad(self));
  });
}

Var Sub(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Sub");
  Graph &g = *a.graph();
  return g.Emit(a.value() - b.value(), {a, b}, [a, b](Graph &g, int self) {
    Accum(g, a, g.grad(self));
    Accum(g, b, -g.grad(self));
  });
}

Var Mul(const Var &a, const Var &b) {
  CheckSameShape(a, b, "Mul");
  Graph &g = *a.graph();
  return g.Emit(a.value().cwiseProduct(b.value()), {a, b},
                [a, b](Graph &g, int self) {
                  Accum(g, a, g.grad(self).cwiseProduct(b.value()));
                  Accum(g, b, g.grad(self).cwiseProduct(a.value()));
                });
}

Var Scale(const Var &a, double factor) {
  Graph &g = *a.graph();
  return g.Emit(a.value() * factor, {a}, [a, factor](Graph &g, int self) {
    Accum(g, a, g.grad(self) * factor);
  });
}

Var AddRowBroadcast(const Var &a, const Var &row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw DimensionError("AddRowBroadcast: row has wrong shape");
  Graph &g = *a.graph();
  Matrix out = a.value().rowwise() + row.value().row(0);
  return g.Emit(std::move(out), {a, row}, [a, row](Graph &g, int self) {
    Accum(g, a, g.grad(self));
    Accum(g, row, g.grad(self).colwise().sum());
  });
}

Var ScaleByScalar(const Var &a, const Var &s) {
  if (s.rows() != 1 || s.cols() != 1)
    throw DimensionError("ScaleByScalar: scale must be 1x1");
  Graph &g = *a.graph();
  return g.Emit(a.value() * s.scalar(), {a, s}, [a, s](Graph &g, int self) {
    Accum(g, a, g.grad(self) * s.scalar());
    if (g.requires_grad(s))
      g.MutableGrad(s.id())(0, 0) += g.grad(self).cwiseProduct(a.value()).sum();
  });
}

Var Linear(const Var &x, const Var &w, const Var &b) {
  return AddRowBroadcast(MatMul(x, w), b);
}

Var Sum(const Var &a) {
  Graph &g = *a.graph();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return g.Emit(std::move(out), {a}, [a](Graph &g, int self) {
    double d = g.grad(self)(0, 0);
    Accum(g, a, Matrix::Constant(a.rows(), a.cols(), d));
  });
}

Var Mean(const Var &a) {
  const double n = static_cast<double>(a.value().size());
  return Scale(Sum(a), 1.0 / n);
}

Var MeanRows(const Var &a) {
  Graph &g = *a.graph();
  const double t = static_cast<double>(a.rows());
  Matrix out = a.value().colwise().sum() / t;
  return g.Emit(std::move(out), {a}, [a, t](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    RowVector d = g.grad(self).row(0) / t;
    g.MutableGrad(a.id()).rowwise() += d;
  });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("ConcatRows: no inputs");
  Graph &g = *parts[0].graph();
  Eigen::Index rows = 0, cols = parts[0].cols();
  for (const Var &p : parts) {
    if (p.cols() != cols) throw DimensionError("ConcatRows: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var &p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return g.Emit(std::move(out), parts, [inputs](Graph &g, int self) {
    Eigen::Index at = 0;
    for (const Var &p : inputs) {
      Accum(g, p, g.grad(self).middleRows(at, p.rows()));
      at += p.rows();
    }
  });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("ConcatCols: no inputs");
  Graph &g = *parts[0].graph();
  Eigen::Index rows = parts[0].rows(), cols = 0;
  for (const Var &p : parts) {
    if (p.rows() != rows) throw DimensionError("ConcatCols: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var &p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return g.Emit(std::move(out), parts, [inputs](Graph &g, int self) {
    Eigen::Index at = 0;
    for (const Var &p : inputs) {
      Accum(g, p, g.grad(self).middleCols(at, p.cols()));
      at += p.cols();
    }
  });
}

Var SliceRows(const Var &a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.rows())
    throw DimensionError("SliceRows: range out of bounds");
  Graph &g = *a.graph();
  return g.Emit(a.value().middleRows(start, count), {a},
                [a, start, count](Graph &g, int self) {
                  if (g.requires_grad(a))
                    g.MutableGrad(a.id()).middleRows(start, count) += g.grad(self);
                });
}

Var SliceCols(const Var &a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.cols())
    throw DimensionError("SliceCols: range out of bounds");
  Graph &g = *a.graph();
  return g.Emit(a.value().middleCols(start, count), {a},
                [a, start, count](Graph &g, int self) {
                  if (g.requires_grad(a))
                    g.MutableGrad(a.id()).middleCols(start, count) += g.grad(self);
                });
}

Var GatherRows(const Var &a, std::span<const int> rows) {
  Graph &g = *a.graph();
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows())
      throw IndexError("GatherRows: row index out of range");
    out.row(i) = a.value().row(rows[i]);
  }
  std::vector<int> idx(rows.begin(), rows.end());
  return g.Emit(std::move(out), {a}, [a, idx](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    Matrix &ga = g.MutableGrad(a.id());
    for (size_t i = 0; i < idx.size(); ++i) ga.row(idx[i]) += g.grad(self).row(i);
  });
}

Var RepeatRows(const Var &a, int times) {
  Graph &g = *a.graph();
  Matrix out(a.rows() * times, a.cols());
  for (Eigen::Index b = 0; b < a.rows(); ++b)
    for (int t = 0; t < times; ++t) out.row(b * times + t) = a.value().row(b);
  return g.Emit(std::move(out), {a}, [a, times](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    Matrix &ga = g.MutableGrad(a.id());
    for (Eigen::Index b = 0; b < a.rows(); ++b)
      for (int t = 0; t < times; ++t) ga.row(b) += g.grad(self).row(b * times + t);
  });
}

Var TileRows(const Var &a, int times) {
  Graph &g = *a.graph();
  Matrix out(a.rows() * times, a.cols());
  for (int b = 0; b < times; ++b) out.middleRows(b * a.rows(), a.rows()) = a.value();
  return g.Emit(std::move(out), {a}, [a, times](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    Matrix &ga = g.MutableGrad(a.id());
    for (int b = 0; b < times; ++b)
      ga += g.grad(self).middleRows(b * a.rows(), a.rows());
  });
}

Var PadOrTruncateCols(const Var &a, int cols) {
  Graph &g = *a.graph();
  const int keep = std::min<int>(cols, static_cast<int>(a.cols()));
  Matrix out = Matrix::Zero(a.rows(), cols);
  out.leftCols(keep) = a.value().leftCols(keep);
  return g.Emit(std::move(out), {a}, [a, keep](Graph &g, int self) {
    if (g.requires_grad(a))
      g.MutableGrad(a.id()).leftCols(keep) += g.grad(self).leftCols(keep);
  });
}

Var MidpointRows(const Var &a, std::span<const int> first,
                 std::span<const int> second) {
  if (first.size() != second.size())
    throw DimensionError("MidpointRows: index lists differ in length");
  Graph &g = *a.graph();
  Matrix out(static_cast<Eigen::Index>(first.size()), a.cols());
  for (size_t i = 0; i < first.size(); ++i)
    out.row(i) = 0.5 * a.value().row(first[i]) + 0.5 * a.value().row(second[i]);
  std::vector<int> fa(first.begin(), first.end()), sb(second.begin(), second.end());
  return g.Emit(std::move(out), {a}, [a, fa, sb](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    Matrix &ga = g.MutableGrad(a.id());
    for (size_t i = 0; i < fa.size(); ++i) {
      ga.row(fa[i]) += 0.5 * g.grad(self).row(i);
      ga.row(sb[i]) += 0.5 * g.grad(self).row(i);
    }
  });
}

Var MidpointCols(const Var &a, std::span<const int> first,
                 std::span<const int> second) {
  if (first.size() != second.size())
    throw DimensionError("MidpointCols: index lists differ in length");
  Graph &g = *a.graph();
  Matrix out(a.rows(), static_cast<Eigen::Index>(first.size()));
  for (size_t i = 0; i < first.size(); ++i)
    out.col(i) = 0.5 * a.value().col(first[i]) + 0.5 * a.value().col(second[i]);
  std::vector<int> fa(first.begin(), first.end()), sb(second.begin(), second.end());
  return g.Emit(std::move(out), {a}, [a, fa, sb](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    Matrix &ga = g.MutableGrad(a.id());
    for (size_t i = 0; i < fa.size(); ++i) {
      ga.col(fa[i]) += 0.5 * g.grad(self).col(i);
      ga.col(sb[i]) += 0.5 * g.grad(self).col(i);
    }
  });
}

Var Tanh(const Var &a) {
  Graph &g = *a.graph();
  Matrix out = a.value().array().tanh().matrix();
  return g.Emit(std::move(out), {a}, [a](Graph &g, int self) {
    const Matrix &y = g.value(self);
    Accum(g, a, g.grad(self).cwiseProduct(
                    (1.0 - y.array().square()).matrix()));
  });
}

Var Gelu(const Var &a) {
  Graph &g = *a.graph();
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  Matrix out = a.value().unaryExpr([inv_sqrt2](double x) {
    return 0.5 * x * (1.0 + std::erf(x * inv_sqrt2));
  });
  return g.Emit(std::move(out), {a}, [a, inv_sqrt2](Graph &g, int self) {
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    Matrix d = a.value().unaryExpr([=](double x) {
      double cdf = 0.5 * (1.0 + std::erf(x * inv_sqrt2));
      double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
      return cdf + x * pdf;
    });
    Accum(g, a, g.grad(self).cwiseProduct(d));
  });
}

Var LeakyRelu(const Var &a, double slope) {
  Graph &g = *a.graph();
  Matrix out = a.value().unaryExpr(
      [slope](double x) { return x > 0 ? x : slope * x; });
  return g.Emit(std::move(out), {a}, [a, slope](Graph &g, int self) {
    Matrix d = a.value().unaryExpr(
        [slope](double x) { return x > 0 ? 1.0 : slope; });
    Accum(g, a, g.grad(self).cwiseProduct(d));
  });
}

Var Sigmoid(const Var &a) {
  Graph &g = *a.graph();
  Matrix out = a.value().unaryExpr([](double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
  });
  return g.Emit(std::move(out), {a}, [a](Graph &g, int self) {
    const Matrix &y = g.value(self);
    Accum(g, a, g.grad(self).cwiseProduct(
                    (y.array() * (1.0 - y.array())).matrix()));
  });
}

Var Dropout(const Var &a, double rate, bool training, Rng &rng) {
  if (!training || rate <= 0.0) return a;
  Graph &g = *a.graph();
  Matrix mask(a.rows(), a.cols());
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < mask.cols(); ++j)
    for (Eigen::Index i = 0; i < mask.rows(); ++i)
      mask(i, j) = rng.Uniform() >= rate ? keep : 0.0;
  Matrix out = a.value().cwiseProduct(mask);
  return g.Emit(std::move(out), {a}, [a, mask](Graph &g, int self) {
    Accum(g, a, g.grad(self).cwiseProduct(mask));
  });
}

Var LayerNormRows(const Var &a, const Var &gamma, const Var &beta,
                  double eps) {
  const Eigen::Index n = a.cols();
  if (gamma.rows() != 1 || gamma.cols() != n || beta.rows() != 1 ||
      beta.cols() != n)
    throw DimensionError("LayerNormRows: gamma/beta must be 1 x cols");
  Graph &g = *a.graph();
  Matrix xhat(a.rows(), n);
  Vector inv_std(a.rows());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    double mean = a.value().row(r).mean();
    RowVector centered = a.value().row(r).array() - mean;
    double var = centered.squaredNorm() / static_cast<double>(n);
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = centered * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * gamma.value().row(0).array())
                   .matrix()
                   .rowwise() +
               beta.value().row(0);
  return g.Emit(std::move(out), {a, gamma, beta},
                [a, gamma, beta, xhat, inv_std](Graph &g, int self) {
                  const Matrix &gout = g.grad(self);
                  Accum(g, gamma, gout.cwiseProduct(xhat).colwise().sum());
                  Accum(g, beta, gout.colwise().sum());
                  if (!g.requires_grad(a)) return;
                  Matrix dxhat = (gout.array().rowwise() *
                                  gamma.value().row(0).array())
                                     .matrix();
                  Matrix &ga = g.MutableGrad(a.id());
                  const double n = static_cast<double>(xhat.cols());
                  for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
                    double m1 = dxhat.row(r).sum() / n;
                    double m2 = dxhat.row(r).dot(xhat.row(r)) / n;
                    ga.row(r) += inv_std(r) *
                                 (dxhat.row(r).array() - m1 -
                                  xhat.row(r).array() * m2)
                                     .matrix();
                  }
                });
}

Var SoftmaxRows(const Var &a) {
  Graph &g = *a.graph();
  Matrix out(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    double mx = a.value().row(r).maxCoeff();
    RowVector e = (a.value().row(r).array() - mx).exp();
    out.row(r) = e / e.sum();
  }
  return g.Emit(std::move(out), {a}, [a](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    const Matrix &y = g.value(self);
    const Matrix &gout = g.grad(self);
    Matrix &ga = g.MutableGrad(a.id());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      double dot = gout.row(r).dot(y.row(r));
      ga.row(r) += (y.row(r).array() * (gout.row(r).array() - dot)).matrix();
    }
  });
}

Var L2NormalizeRows(const Var &a, double min_norm) {
  Graph &g = *a.graph();
  Vector norms = a.value().rowwise().norm();
  for (Eigen::Index r = 0; r < norms.size(); ++r)
    if (!(norms(r) >= min_norm))
      throw DegenerateError("row " + std::to_string(r) +
                            " has near-zero norm");
  Matrix out = norms.cwiseInverse().asDiagonal() * a.value();
  return g.Emit(std::move(out), {a}, [a, norms](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    const Matrix &y = g.value(self);
    const Matrix &gout = g.grad(self);
    Matrix &ga = g.MutableGrad(a.id());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      double dot = gout.row(r).dot(y.row(r));
      ga.row(r) += (gout.row(r) - dot * y.row(r)) / norms(r);
    }
  });
}

Var L2NormalizeCols(const Var &a, double min_norm) {
  Graph &g = *a.graph();
  RowVector norms = a.value().colwise().norm();
  for (Eigen::Index c = 0; c < norms.size(); ++c)
    if (!(norms(c) >= min_norm))
      throw DegenerateError("column " + std::to_string(c) +
                            " has near-zero norm");
  Matrix out = a.value() * norms.cwiseInverse().asDiagonal();
  return g.Emit(std::move(out), {a}, [a, norms](Graph &g, int self) {
    if (!g.requires_grad(a)) return;
    const Matrix &y = g.value(self);
    const Matrix &gout = g.grad(self);
    Matrix &ga = g.MutableGrad(a.id());
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      double dot = gout.col(c).dot(y.col(c));
      ga.col(c) += (gout.col(c) - dot * y.col(c)) / norms(c);
    }
  });
}

Var SpectralNormalize(const Var &w, const Vector &u, const Vector &v) {
  if (u.size() != w.rows() || v.size() != w.cols())
    throw DimensionError("SpectralNormalize: u/v do not match the weight");
  Graph &g = *w.graph();
  const double sigma = u.dot(w.value() * v);
  if (!(std::abs(sigma) > 0))
    throw DegenerateError("SpectralNormalize: zero singular value estimate");
  return g.Emit(w.value() / sigma, {w}, [w, u, v, sigma](Graph &g, int self) {
    if (!g.requires_grad(w)) return;
    const Matrix &gout = g.grad(self);
    double inner = gout.cwiseProduct(w.value()).sum();
    g.MutableGrad(w.id()) += gout / sigma - (inner / (sigma * sigma)) * (u * v.transpose());
  });
}

Var Im2Col(const Var &a, int kernel, int pad) {
  const int t_in = static_cast<int>(a.rows());
  const int c = static_cast<int>(a.cols());
  const int t_out = t_in + 2 * pad - kernel + 1;
  if (kernel < 1 || t_out < 1)
    throw DimensionError("Im2Col: sequence shorter than the kernel");
  Graph &g = *a.graph();
  Matrix out = Matrix::Zero(t_out, static_cast<Eigen::Index>(kernel) * c);
  for (int t = 0; t < t_out; ++t)
    for (int j = 0; j < kernel; ++j) {
      int src = t + j - pad;
      if (src >= 0 && src < t_in) out.block(t, j * c, 1, c) = a.value().row(src);
    }
  return g.Emit(std::move(out), {a},
                [a, kernel, pad, t_in, t_out, c](Graph &g, int self) {
                  if (!g.requires_grad(a)) return;
                  Matrix &ga = g.MutableGrad(a.id());
                  const Matrix &gout = g.grad(self);
                  for (int t = 0; t < t_out; ++t)
                    for (int j = 0; j < kernel; ++j) {
                      int src = t + j - pad;
                      if (src >= 0 && src < t_in)
                        ga.row(src) += gout.block(t, j * c, 1, c);
                    }
                });
}

Var GroupSoftmax(const Var &scores, int group) {
  if (scores.cols() != 1 || group < 1 || scores.rows() % group != 0)
    throw DimensionError("GroupSoftmax: need a column of whole groups");
  Graph &g = *scores.graph();
  const Eigen::Index num_groups = scores.rows() / group;
  Matrix out(scores.rows(), 1);
  for (Eigen::Index b = 0; b < num_groups; ++b) {
    auto s = scores.value().middleRows(b * group, group);
    double mx = s.maxCoeff();
    Matrix e = (s.array() - mx).exp().matrix();
    out.middleRows(b * group, group) = e / e.sum();
  }
  return g.Emit(std::move(out), {scores},
                [scores, group, num_groups](Graph &g, int self) {
                  if (!g.requires_grad(scores)) return;
                  const Matrix &y = g.value(self);
                  const Matrix &gout = g.grad(self);
                  Matrix &ga = g.MutableGrad(scores.id());
                  for (Eigen::Index b = 0; b < num_groups; ++b) {
                    auto yb = y.middleRows(b * group, group);
                    auto gb = gout.middleRows(b * group, group);
                    double dot = gb.col(0).dot(yb.col(0));
                    ga.middleRows(b * group, group).array() +=
                        yb.array() * (gb.array() - dot);
                  }
                });
}

Var GroupWeightedSum(const Var &alpha, const Var &x, int group) {
  if (alpha.cols() != 1 || alpha.rows() != x.rows() || group < 1 ||
      x.rows() % group != 0)
    throw DimensionError("GroupWeightedSum: shapes do not match");
  Graph &g = *x.graph();
  const Eigen::Index num_groups = x.rows() / group;
  Matrix out = Matrix::Zero(num_groups, x.cols());
  for (Eigen::Index b = 0; b < num_groups; ++b)
    for (int t = 0; t < group; ++t)
      out.row(b) += alpha.value()(b * group + t, 0) * x.value().row(b * group + t);
  return g.Emit(std::move(out), {alpha, x},
                [alpha, x, group, num_groups](Graph &g, int self) {
                  const Matrix &gout = g.grad(self);
                  const bool da = g.requires_grad(alpha), dx = g.requires_grad(x);
                  for (Eigen::Index b = 0; b < num_groups; ++b)
                    for (int t = 0; t < group; ++t) {
                      Eigen::Index r = b * group + t;
                      if (da)
                        g.MutableGrad(alpha.id())(r, 0) +=
                            gout.row(b).dot(x.value().row(r));
                      if (dx)
                        g.MutableGrad(x.id()).row(r) +=
                            alpha.value()(r, 0) * gout.row(b);
                    }
                });
}

}  // namespace nn
}  // namespace classaug

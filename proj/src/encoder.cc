// encoder.cc

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

#include "classaug/encoder.h"

#include <cmath>

#include "classaug/errors.h"

namespace classaug {

Matrix ScaledNormal(int rows, int cols, double stddev, Rng &rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = stddev * rng.Normal();
  return m;
}

nn::Var Encoder::ForwardBatch(nn::Graph &graph,
                              std::span<const FbankMatrix> batch) {
  std::vector<nn::Var> rows;
  rows.reserve(batch.size());
  for (const auto &frames : batch) rows.push_back(Forward(graph, frames));
  return nn::ConcatRows(rows);
}

Vector Encoder::Encode(const FbankMatrix &frames) {
  nn::Graph graph;
  return Forward(graph, frames).value().row(0).transpose();
}

Matrix Encoder::EncodeBatch(std::span<const FbankMatrix> batch) {
  Matrix out(static_cast<Eigen::Index>(batch.size()), Dim());
  for (size_t i = 0; i < batch.size(); ++i)
    out.row(i) = Encode(batch[i]).transpose();
  return out;
}

ReferenceEncoder::ReferenceEncoder(const Options &o, uint64_t seed)
    : options_(o) {
  if (o.input_dim < 1 || o.channels < 1 || o.embed_dim < 1 || o.kernel < 1 ||
      o.kernel % 2 == 0)
    throw DimensionError("ReferenceEncoder: bad options");
  Rng rng(seed);
  const int c = o.channels, k = o.kernel;
  auto fan = [](int n) { return 1.0 / std::sqrt(static_cast<double>(n)); };
  conv1_w_ = {"encoder.conv1.weight", ScaledNormal(k * o.input_dim, c, fan(k * o.input_dim), rng)};
  conv1_b_ = {"encoder.conv1.bias", Matrix::Zero(1, c)};
  conv2_w_ = {"encoder.conv2.weight", ScaledNormal(k * c, c, fan(k * c), rng)};
  conv2_b_ = {"encoder.conv2.bias", Matrix::Zero(1, c)};
  norm_gamma_ = {"encoder.attn_norm.gamma", Matrix::Ones(1, c)};
  norm_beta_ = {"encoder.attn_norm.beta", Matrix::Zero(1, c)};
  query_ = {"encoder.attn.query", ScaledNormal(c, c, fan(c), rng)};
  key_ = {"encoder.attn.key", ScaledNormal(c, c, fan(c), rng)};
  value_ = {"encoder.attn.value", ScaledNormal(c, c, fan(c), rng)};
  out_ = {"encoder.attn.out", ScaledNormal(c, c, fan(c), rng)};
  proj_w_ = {"encoder.proj.weight", ScaledNormal(c, o.embed_dim, fan(c), rng)};
  proj_b_ = {"encoder.proj.bias", Matrix::Zero(1, o.embed_dim)};
}

std::vector<nn::Parameter *> ReferenceEncoder::Parameters() {
  return {&conv1_w_, &conv1_b_, &conv2_w_,   &conv2_b_, &norm_gamma_,
          &norm_beta_, &query_, &key_,       &value_,   &out_,
          &proj_w_,  &proj_b_};
}

int64_t ReferenceEncoder::NumParameters() {
  int64_t n = 0;
  for (auto *p : Parameters()) n += p->Size();
  return n;
}

nn::Var ReferenceEncoder::Forward(nn::Graph &g, const FbankMatrix &frames) {
  if (frames.Dim() != options_.input_dim)
    throw DimensionError("encoder expects " +
                         std::to_string(options_.input_dim) +
                         "-dimensional frames, got " +
                         std::to_string(frames.Dim()));
  if (frames.NumFrames() < 1) throw DimensionError("encoder: no frames");
  const int pad = options_.kernel / 2;
  Matrix normalized =
      frames.frames.rowwise() - frames.frames.colwise().mean();
  nn::Var x = g.Constant(std::move(normalized));

  nn::Var h1 = nn::Gelu(nn::Linear(nn::Im2Col(x, options_.kernel, pad),
                                   g.Param(conv1_w_), g.Param(conv1_b_)));
  nn::Var h2 = nn::Add(
      h1, nn::Gelu(nn::Linear(nn::Im2Col(h1, options_.kernel, pad),
                              g.Param(conv2_w_), g.Param(conv2_b_))));

  nn::Var a = nn::LayerNormRows(h2, g.Param(norm_gamma_), g.Param(norm_beta_));
  nn::Var q = nn::MatMul(a, g.Param(query_));
  nn::Var k = nn::MatMul(a, g.Param(key_));
  nn::Var v = nn::MatMul(a, g.Param(value_));
  const double inv_sqrt_c = 1.0 / std::sqrt(static_cast<double>(options_.channels));
  nn::Var attn =
      nn::SoftmaxRows(nn::Scale(nn::MatMul(q, nn::Transpose(k)), inv_sqrt_c));
  nn::Var h3 =
      nn::Add(h2, nn::MatMul(nn::MatMul(attn, v), g.Param(out_)));

  return nn::Linear(nn::MeanRows(h3), g.Param(proj_w_), g.Param(proj_b_));
}

Matrix CosineLogits(const Matrix &embeddings,
                    const ClassifierWeights &weights) {
  if (embeddings.cols() != weights.Dim())
    throw DimensionError("CosineLogits: embedding dimension " +
                         std::to_string(embeddings.cols()) +
                         " != weight dimension " +
                         std::to_string(weights.Dim()));
  Vector en = embeddings.rowwise().norm();
  RowVector wn = weights.w.colwise().norm();
  for (Eigen::Index i = 0; i < en.size(); ++i)
    if (!(en(i) >= 1e-12))
      throw DegenerateError("embedding row " + std::to_string(i) +
                            " has near-zero norm");
  for (Eigen::Index j = 0; j < wn.size(); ++j)
    if (!(wn(j) >= 1e-12))
      throw DegenerateError("weight column " + std::to_string(j) +
                            " has near-zero norm");
  Matrix out = en.cwiseInverse().asDiagonal() * (embeddings * weights.w) *
               wn.cwiseInverse().asDiagonal();
  return out.cwiseMax(-1.0).cwiseMin(1.0);
}

nn::Var CosineLogits(const nn::Var &embeddings, const nn::Var &weights) {
  if (embeddings.cols() != weights.rows())
    throw DimensionError("CosineLogits: embedding/weight dimension mismatch");
  return nn::MatMul(nn::L2NormalizeRows(embeddings),
                    nn::L2NormalizeCols(weights));
}

ClassificationHead::ClassificationHead(int embed_dim, int num_classes,
                                       uint64_t seed) {
  Rng rng(seed);
  weight_ = {"head.weight", ScaledNormal(embed_dim, num_classes, 1.0, rng)};
}

}  // namespace classaug

// classaug/encoder.h

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

#ifndef CLASSAUG_ENCODER_H_
#define CLASSAUG_ENCODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "classaug/autograd.h"
#include "classaug/fbank.h"
#include "classaug/types.h"

namespace classaug {

/// Maps a filterbank matrix of any length to a fixed-size embedding.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual int Dim() const = 0;
  virtual int InputDim() const = 0;
  /// Records the forward pass for one utterance; returns a [1 x Dim()] node.
  /// Throws DimensionError if frames.Dim() != InputDim().
  virtual nn::Var Forward(nn::Graph &graph, const FbankMatrix &frames) = 0;
  virtual std::vector<nn::Parameter *> Parameters() = 0;

  /// [B x Dim()], one row per utterance.
  nn::Var ForwardBatch(nn::Graph &graph, std::span<const FbankMatrix> batch);
  /// Inference helpers; no gradient bookkeeping survives the call.
  Vector Encode(const FbankMatrix &frames);
  Matrix EncodeBatch(std::span<const FbankMatrix> batch);
};

/// Two residual convolution-over-time blocks, one single-head self-attention
/// block, mean pooling over frames and a linear projection. Input frames
/// are mean-normalized per utterance.
class ReferenceEncoder : public Encoder {
 public:
  struct Options {
    int input_dim = 80;
    int channels = 64;
    int embed_dim = 32;
    int kernel = 3;
  };

  ReferenceEncoder(const Options &options, uint64_t seed);

  int Dim() const override { return options_.embed_dim; }
  int InputDim() const override { return options_.input_dim; }
  nn::Var Forward(nn::Graph &graph, const FbankMatrix &frames) override;
  std::vector<nn::Parameter *> Parameters() override;

  int64_t NumParameters();
  const Options &options() const { return options_; }

 private:
  Options options_;
  nn::Parameter conv1_w_, conv1_b_;
  nn::Parameter conv2_w_, conv2_b_;
  nn::Parameter norm_gamma_, norm_beta_;
  nn::Parameter query_, key_, value_, out_;
  nn::Parameter proj_w_, proj_b_;
};

/// cos(e_i, w_j) for every row of e and column of W. Throws DegenerateError
/// if a norm is below 1e-12. Values are clamped to [-1, 1].
Matrix CosineLogits(const Matrix &embeddings, const ClassifierWeights &weights);
nn::Var CosineLogits(const nn::Var &embeddings, const nn::Var &weights);

/// AM-Softmax head: one column per class, drawn from a unit-variance
/// normal and L2-normalized only inside the logits.
class ClassificationHead {
 public:
  ClassificationHead() = default;
  ClassificationHead(int embed_dim, int num_classes, uint64_t seed);

  ClassifierWeights Weights() const { return {weight_.value}; }
  nn::Parameter &weight() { return weight_; }
  std::vector<nn::Parameter *> Parameters() { return {&weight_}; }

 private:
  nn::Parameter weight_;
};

/// Normal(0, 1/fan_in) initializer.
Matrix ScaledNormal(int rows, int cols, double stddev, Rng &rng);

}  // namespace classaug

#endif  // CLASSAUG_ENCODER_H_

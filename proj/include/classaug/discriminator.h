// classaug/discriminator.h

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

#ifndef CLASSAUG_DISCRIMINATOR_H_
#define CLASSAUG_DISCRIMINATOR_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "classaug/autograd.h"
#include "classaug/config.h"
#include "classaug/rng.h"
#include "classaug/types.h"

namespace classaug {

/// One power-iteration step on M [in x out] with the row-vector convention
/// (y = x M): v = M^T u / |.|, u = M v / |.|. Returns M / (u^T M v).
/// u is updated in place; v receives the right vector if given.
Matrix SpectralNormalizeMatrix(const Matrix &m, Vector *u, Vector *v = nullptr);

/// Dense layer y = x W_sn + b where W_sn is W divided by a running
/// power-iteration estimate of its top singular value.
class SpectralLinear {
 public:
  SpectralLinear() = default;
  SpectralLinear(const std::string &name, int in, int out, bool bias,
                 Rng &rng);

  /// Advances the power iteration once. The trainer calls this once per
  /// discriminator step.
  void PowerIterate();
  /// Current singular value estimate u^T W v.
  double Sigma() const;
  /// W / sigma with the current u, v. A zero matrix is returned unchanged.
  Matrix NormalizedWeight() const;

  nn::Var Forward(nn::Graph &graph, const nn::Var &x);

  nn::Parameter &weight() { return weight_; }
  nn::Parameter &bias() { return bias_; }
  std::vector<nn::Parameter *> Parameters();
  std::vector<nn::Buffer> Buffers();

 private:
  nn::Parameter weight_, bias_;
  bool has_bias_ = false;
  Matrix u_, v_;  // [in x 1], [out x 1]
};

/// A frozen sequence model exposing its hidden states.
class Backbone {
 public:
  virtual ~Backbone() = default;
  virtual int Depth() const = 0;
  virtual int Width() const = 0;
  virtual bool Frozen() const = 0;
  /// seq [N x Width()]; returns the states after each requested layer
  /// (1-based). Throws MissingLayerError for indices outside [1, Depth()].
  virtual std::map<int, nn::Var> Forward(nn::Graph &graph, const nn::Var &seq,
                                         const std::vector<int> &layers) = 0;
};

/// depth blocks x <- x + tanh(x A_l + c_l) with seeded random A_l, c_l.
/// Rows are processed independently.
class StubBackbone : public Backbone {
 public:
  StubBackbone(int width, int depth, uint64_t seed);

  int Depth() const override { return static_cast<int>(mix_.size()); }
  int Width() const override { return width_; }
  bool Frozen() const override { return true; }
  std::map<int, nn::Var> Forward(nn::Graph &graph, const nn::Var &seq,
                                 const std::vector<int> &layers) override;

  const Matrix &mix(int layer) const { return mix_.at(layer - 1); }

 private:
  int width_;
  std::vector<Matrix> mix_;
  std::vector<Matrix> offset_;
};

/// Norm2(Intermediate(Norm1(x W_down + b_down))) + skip(x), where skip
/// zero-pads or truncates x to the adapter width.
class Adapter {
 public:
  Adapter() = default;
  Adapter(int input_dim, int width, double dropout, Rng &rng);

  nn::Var Forward(nn::Graph &graph, const nn::Var &x, bool training,
                  Rng &dropout_rng);
  /// Transform path only, without the skip.
  nn::Var Transform(nn::Graph &graph, const nn::Var &x, bool training,
                    Rng &dropout_rng);

  SpectralLinear &down() { return down_; }
  nn::Parameter &norm1_gamma() { return norm1_gamma_; }
  nn::Parameter &norm1_beta() { return norm1_beta_; }
  nn::Parameter &norm2_gamma() { return norm2_gamma_; }
  nn::Parameter &norm2_beta() { return norm2_beta_; }
  nn::Parameter &fc1_weight() { return fc1_w_; }
  nn::Parameter &fc1_bias() { return fc1_b_; }
  nn::Parameter &fc2_weight() { return fc2_w_; }
  nn::Parameter &fc2_bias() { return fc2_b_; }
  int width() const { return width_; }

  std::vector<nn::Parameter *> Parameters();
  std::vector<nn::Buffer> Buffers() { return down_.Buffers(); }
  void PowerIterate() { down_.PowerIterate(); }

 private:
  int width_ = 0;
  double dropout_ = 0.0;
  SpectralLinear down_;
  nn::Parameter norm1_gamma_, norm1_beta_;
  nn::Parameter fc1_w_, fc1_b_, fc2_w_, fc2_b_;
  nn::Parameter norm2_gamma_, norm2_beta_;
};

/// Attention statistics of the most recent pooling pass.
struct AttentionTrace {
  double max_sum_error = 0.0;  // max over groups and heads of |sum - 1|
  double min_weight = 1.0;
  int groups = 0;
};

/// Multi-head attentive pooling over groups of `frames` consecutive rows:
/// alpha = softmax_t(v^T tanh(W h_t + b)), mu = sum_t alpha_t h_t, heads
/// concatenated.
class AttentivePooling {
 public:
  AttentivePooling() = default;
  AttentivePooling(int width, int heads, Rng &rng);

  /// hidden [B*frames x width] -> [B x heads*width].
  nn::Var Forward(nn::Graph &graph, const nn::Var &hidden, int frames,
                  AttentionTrace *trace = nullptr);

  int heads() const { return static_cast<int>(context_.size()); }
  nn::Parameter &context(int head) { return context_[head]; }
  nn::Parameter &transform(int head) { return transform_[head]; }
  nn::Parameter &transform_bias(int head) { return transform_bias_[head]; }
  std::vector<nn::Parameter *> Parameters();

 private:
  std::vector<nn::Parameter> transform_, transform_bias_, context_;
};

/// Per selected layer: LayerNorm, spectrally normalized projection and
/// attentive pooling; the pooled vectors are summed with learned weights.
class LayerCombination {
 public:
  LayerCombination() = default;
  LayerCombination(const std::vector<int> &layers, int width, Rng &rng);

  /// Throws MissingLayerError if a selected layer is absent from states.
  nn::Var Forward(nn::Graph &graph, const std::map<int, nn::Var> &states,
                  AttentivePooling &pooling, int frames,
                  AttentionTrace *trace = nullptr);

  const std::vector<int> &layers() const { return layers_; }
  nn::Parameter &layer_weights() { return layer_weights_; }
  SpectralLinear &projection(int i) { return projections_[i]; }
  std::vector<nn::Parameter *> Parameters();
  std::vector<nn::Buffer> Buffers();
  void PowerIterate();

 private:
  std::vector<int> layers_;
  nn::Parameter layer_weights_;  // [1 x L]
  std::vector<nn::Parameter> norm_gamma_, norm_beta_;
  std::vector<SpectralLinear> projections_;
};

/// Maps embeddings to probabilities of being real.
class Discriminator {
 public:
  virtual ~Discriminator() = default;
  /// e [B x d] -> [B x 1] probabilities.
  virtual nn::Var Forward(nn::Graph &graph, const nn::Var &e, bool training,
                          Rng &dropout_rng, AttentionTrace *trace = nullptr) = 0;
  virtual std::vector<nn::Parameter *> Parameters() = 0;
  virtual std::vector<nn::Buffer> Buffers() = 0;
  virtual void PowerIterate() = 0;
  /// Frozen weights, for checking that training leaves them alone.
  virtual std::vector<const Matrix *> FrozenWeights() const { return {}; }

  /// Inference-mode probabilities.
  Vector Discriminate(const Matrix &e);
};

/// Adapter, pseudo-sequence with learned offsets, frozen backbone, layer
/// combination and a residual classification head.
class SemanticDiscriminator : public Discriminator {
 public:
  struct Options {
    int input_dim = 32;
    int width = 32;
    int heads = 4;
    int seq_len = 4;
    int head_hidden = 64;
    int head_blocks = 2;
    double dropout = 0.1;
    std::vector<int> layers{7, 9, 11, 12};

    static Options FromConfig(const ExperimentConfig &cfg);
  };

  SemanticDiscriminator(const Options &options,
                        std::unique_ptr<Backbone> backbone, uint64_t seed);
  /// Uses a StubBackbone of cfg.backbone_depth blocks.
  SemanticDiscriminator(const ExperimentConfig &cfg, uint64_t seed);

  nn::Var Forward(nn::Graph &graph, const nn::Var &e, bool training,
                  Rng &dropout_rng, AttentionTrace *trace = nullptr) override;
  std::vector<nn::Parameter *> Parameters() override;
  std::vector<nn::Buffer> Buffers() override;
  void PowerIterate() override;
  std::vector<const Matrix *> FrozenWeights() const override;

  /// The pooled, combined feature [B x heads*width] before the head.
  nn::Var Features(nn::Graph &graph, const nn::Var &e, bool training,
                   Rng &dropout_rng, AttentionTrace *trace = nullptr);

  Adapter &adapter() { return adapter_; }
  Backbone &backbone() { return *backbone_; }
  const Options &options() const { return options_; }

 private:
  Options options_;
  Adapter adapter_;
  nn::Parameter positions_;  // [seq_len x width]
  std::unique_ptr<Backbone> backbone_;
  AttentivePooling pooling_;
  LayerCombination combination_;
  SpectralLinear head_in_;
  std::vector<SpectralLinear> head_blocks_;
  SpectralLinear head_out_;
};

/// Three spectrally normalized dense layers with leaky rectifiers.
class PlainDiscriminator : public Discriminator {
 public:
  PlainDiscriminator(int input_dim, int hidden, double dropout, uint64_t seed);

  nn::Var Forward(nn::Graph &graph, const nn::Var &e, bool training,
                  Rng &dropout_rng, AttentionTrace *trace = nullptr) override;
  std::vector<nn::Parameter *> Parameters() override;
  std::vector<nn::Buffer> Buffers() override;
  void PowerIterate() override;

 private:
  double dropout_;
  SpectralLinear fc1_, fc2_, fc3_;
};

/// The discriminator used by a training mode, or nullptr for modes without
/// the adversarial game.
std::unique_ptr<Discriminator> MakeDiscriminator(const ExperimentConfig &cfg,
                                                 uint64_t seed);

}  // namespace classaug

#endif  // CLASSAUG_DISCRIMINATOR_H_

// discriminator.cc

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

#include "classaug/discriminator.h"

#include <algorithm>
#include <cmath>

#include "classaug/encoder.h"
#include "classaug/errors.h"

namespace classaug {

namespace {

constexpr double kMinSigma = 1e-12;
// Power iterations run at construction so the first forward pass already
// sees a converged estimate.
constexpr int kInitialPowerIterations = 20;

double InvSqrt(int n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

Matrix RandomUnit(int n, Rng &rng) {
  Matrix m = ScaledNormal(n, 1, 1.0, rng);
  return m / m.norm();
}

void NormalizeOrKeep(Vector *x) {
  const double n = x->norm();
  if (n > kMinSigma) *x /= n;
}

}  // namespace

Matrix SpectralNormalizeMatrix(const Matrix &m, Vector *u, Vector *v) {
  if (u->size() != m.rows())
    throw DimensionError("spectral normalization: u does not match rows");
  Vector right = m.transpose() * *u;
  NormalizeOrKeep(&right);
  Vector left = m * right;
  NormalizeOrKeep(&left);
  *u = left;
  if (v) *v = right;
  const double sigma = left.dot(m * right);
  if (!(sigma > kMinSigma)) return m;
  return m / sigma;
}

SpectralLinear::SpectralLinear(const std::string &name, int in, int out,
                               bool bias, Rng &rng)
    : weight_(name + ".weight", ScaledNormal(in, out, InvSqrt(in), rng)),
      has_bias_(bias),
      u_(RandomUnit(in, rng)),
      v_(RandomUnit(out, rng)) {
  if (bias) bias_ = {name + ".bias", Matrix::Zero(1, out)};
  for (int i = 0; i < kInitialPowerIterations; ++i) PowerIterate();
}

void SpectralLinear::PowerIterate() {
  Vector u = u_.col(0), v;
  SpectralNormalizeMatrix(weight_.value, &u, &v);
  u_.col(0) = u;
  v_.col(0) = v;
}

double SpectralLinear::Sigma() const {
  return u_.col(0).dot(weight_.value * v_.col(0));
}

Matrix SpectralLinear::NormalizedWeight() const {
  const double sigma = Sigma();
  if (!(sigma > kMinSigma)) return weight_.value;
  return weight_.value / sigma;
}

nn::Var SpectralLinear::Forward(nn::Graph &graph, const nn::Var &x) {
  nn::Var w = graph.Param(weight_);
  if (Sigma() > kMinSigma) w = nn::SpectralNormalize(w, u_.col(0), v_.col(0));
  nn::Var y = nn::MatMul(x, w);
  if (has_bias_) y = nn::AddRowBroadcast(y, graph.Param(bias_));
  return y;
}

std::vector<nn::Parameter *> SpectralLinear::Parameters() {
  if (has_bias_) return {&weight_, &bias_};
  return {&weight_};
}

std::vector<nn::Buffer> SpectralLinear::Buffers() {
  const std::string base =
      weight_.name.substr(0, weight_.name.size() - std::string(".weight").size());
  return {{base + ".u", &u_}, {base + ".v", &v_}};
}

StubBackbone::StubBackbone(int width, int depth, uint64_t seed)
    : width_(width) {
  Rng rng(seed);
  for (int l = 0; l < depth; ++l) {
    mix_.push_back(ScaledNormal(width, width, InvSqrt(width), rng));
    offset_.push_back(ScaledNormal(1, width, 0.1, rng));
  }
}

std::map<int, nn::Var> StubBackbone::Forward(nn::Graph &graph,
                                             const nn::Var &seq,
                                             const std::vector<int> &layers) {
  int deepest = 0;
  for (int l : layers) {
    if (l < 1 || l > Depth()) throw MissingLayerError(l);
    deepest = std::max(deepest, l);
  }
  if (seq.cols() != width_)
    throw DimensionError("backbone input width " + std::to_string(seq.cols()) +
                         " != " + std::to_string(width_));
  std::map<int, nn::Var> states;
  nn::Var x = seq;
  for (int l = 1; l <= deepest; ++l) {
    nn::Var a = graph.Constant(mix_[l - 1]);
    nn::Var c = graph.Constant(offset_[l - 1]);
    x = nn::Add(x, nn::Tanh(nn::Linear(x, a, c)));
    if (std::find(layers.begin(), layers.end(), l) != layers.end())
      states.emplace(l, x);
  }
  return states;
}

Adapter::Adapter(int input_dim, int width, double dropout, Rng &rng)
    : width_(width),
      dropout_(dropout),
      down_("disc.adapter.down", input_dim, width, true, rng),
      norm1_gamma_("disc.adapter.norm1.gamma", Matrix::Ones(1, width)),
      norm1_beta_("disc.adapter.norm1.beta", Matrix::Zero(1, width)),
      fc1_w_("disc.adapter.fc1.weight",
             ScaledNormal(width, 2 * width, InvSqrt(width), rng)),
      fc1_b_("disc.adapter.fc1.bias", Matrix::Zero(1, 2 * width)),
      fc2_w_("disc.adapter.fc2.weight",
             ScaledNormal(2 * width, width, InvSqrt(2 * width), rng)),
      fc2_b_("disc.adapter.fc2.bias", Matrix::Zero(1, width)),
      norm2_gamma_("disc.adapter.norm2.gamma", Matrix::Ones(1, width)),
      norm2_beta_("disc.adapter.norm2.beta", Matrix::Zero(1, width)) {}

nn::Var Adapter::Transform(nn::Graph &graph, const nn::Var &x, bool training,
                           Rng &dropout_rng) {
  nn::Var h = down_.Forward(graph, x);
  h = nn::LayerNormRows(h, graph.Param(norm1_gamma_), graph.Param(norm1_beta_));
  h = nn::Gelu(nn::Linear(h, graph.Param(fc1_w_), graph.Param(fc1_b_)));
  h = nn::Dropout(h, dropout_, training, dropout_rng);
  h = nn::Linear(h, graph.Param(fc2_w_), graph.Param(fc2_b_));
  return nn::LayerNormRows(h, graph.Param(norm2_gamma_),
                           graph.Param(norm2_beta_));
}

nn::Var Adapter::Forward(nn::Graph &graph, const nn::Var &x, bool training,
                         Rng &dropout_rng) {
  nn::Var skip = x.cols() == width_ ? x : nn::PadOrTruncateCols(x, width_);
  return nn::Add(Transform(graph, x, training, dropout_rng), skip);
}

std::vector<nn::Parameter *> Adapter::Parameters() {
  std::vector<nn::Parameter *> p = down_.Parameters();
  for (nn::Parameter *q : {&norm1_gamma_, &norm1_beta_, &fc1_w_, &fc1_b_,
                           &fc2_w_, &fc2_b_, &norm2_gamma_, &norm2_beta_})
    p.push_back(q);
  return p;
}

AttentivePooling::AttentivePooling(int width, int heads, Rng &rng) {
  if (heads < 1) throw ValidationError("disc_heads", "must be at least 1");
  for (int k = 0; k < heads; ++k) {
    const std::string base = "disc.pool.head" + std::to_string(k);
    transform_.emplace_back(base + ".weight",
                            ScaledNormal(width, width, InvSqrt(width), rng));
    transform_bias_.emplace_back(base + ".bias", Matrix::Zero(1, width));
    context_.emplace_back(base + ".context",
                          ScaledNormal(width, 1, InvSqrt(width), rng));
  }
}

nn::Var AttentivePooling::Forward(nn::Graph &graph, const nn::Var &hidden,
                                  int frames, AttentionTrace *trace) {
  std::vector<nn::Var> pooled;
  for (int k = 0; k < heads(); ++k) {
    nn::Var f = nn::Tanh(nn::Linear(hidden, graph.Param(transform_[k]),
                                    graph.Param(transform_bias_[k])));
    nn::Var alpha =
        nn::GroupSoftmax(nn::MatMul(f, graph.Param(context_[k])), frames);
    if (trace) {
      const Matrix &a = alpha.value();
      const Eigen::Index groups = a.rows() / frames;
      for (Eigen::Index b = 0; b < groups; ++b) {
        auto block = a.middleRows(b * frames, frames);
        trace->max_sum_error =
            std::max(trace->max_sum_error, std::abs(block.sum() - 1.0));
        trace->min_weight = std::min(trace->min_weight, block.minCoeff());
      }
      trace->groups += static_cast<int>(groups);
    }
    pooled.push_back(nn::GroupWeightedSum(alpha, hidden, frames));
  }
  return nn::ConcatCols(pooled);
}

std::vector<nn::Parameter *> AttentivePooling::Parameters() {
  std::vector<nn::Parameter *> p;
  for (int k = 0; k < heads(); ++k) {
    p.push_back(&transform_[k]);
    p.push_back(&transform_bias_[k]);
    p.push_back(&context_[k]);
  }
  return p;
}

LayerCombination::LayerCombination(const std::vector<int> &layers, int width,
                                   Rng &rng)
    : layers_(layers),
      layer_weights_("disc.combine.layer_weights",
                     Matrix::Constant(1, static_cast<int>(layers.size()),
                                      1.0 / static_cast<double>(layers.size()))) {
  for (int l : layers) {
    const std::string base = "disc.combine.layer" + std::to_string(l);
    norm_gamma_.emplace_back(base + ".norm.gamma", Matrix::Ones(1, width));
    norm_beta_.emplace_back(base + ".norm.beta", Matrix::Zero(1, width));
    projections_.emplace_back(base + ".proj", width, width, false, rng);
  }
}

nn::Var LayerCombination::Forward(nn::Graph &graph,
                                  const std::map<int, nn::Var> &states,
                                  AttentivePooling &pooling, int frames,
                                  AttentionTrace *trace) {
  nn::Var weights = graph.Param(layer_weights_);
  nn::Var total;
  for (size_t i = 0; i < layers_.size(); ++i) {
    auto it = states.find(layers_[i]);
    if (it == states.end()) throw MissingLayerError(layers_[i]);
    nn::Var h = nn::LayerNormRows(it->second, graph.Param(norm_gamma_[i]),
                                  graph.Param(norm_beta_[i]));
    h = projections_[i].Forward(graph, h);
    nn::Var term = nn::ScaleByScalar(pooling.Forward(graph, h, frames, trace),
                                     nn::SliceCols(weights, static_cast<int>(i), 1));
    total = i == 0 ? term : nn::Add(total, term);
  }
  return total;
}

std::vector<nn::Parameter *> LayerCombination::Parameters() {
  std::vector<nn::Parameter *> p{&layer_weights_};
  for (size_t i = 0; i < layers_.size(); ++i) {
    p.push_back(&norm_gamma_[i]);
    p.push_back(&norm_beta_[i]);
    for (nn::Parameter *q : projections_[i].Parameters()) p.push_back(q);
  }
  return p;
}

std::vector<nn::Buffer> LayerCombination::Buffers() {
  std::vector<nn::Buffer> b;
  for (SpectralLinear &p : projections_)
    for (const nn::Buffer &x : p.Buffers()) b.push_back(x);
  return b;
}

void LayerCombination::PowerIterate() {
  for (SpectralLinear &p : projections_) p.PowerIterate();
}

Vector Discriminator::Discriminate(const Matrix &e) {
  nn::Graph graph;
  Rng unused(0);
  nn::Var p = Forward(graph, graph.Constant(e), false, unused);
  return p.value().col(0);
}

SemanticDiscriminator::Options SemanticDiscriminator::Options::FromConfig(
    const ExperimentConfig &cfg) {
  Options o;
  o.input_dim = cfg.embed_dim;
  o.width = cfg.disc_hidden;
  o.heads = cfg.disc_heads;
  o.seq_len = cfg.pseudo_seq_len;
  o.head_hidden = cfg.head_hidden;
  o.head_blocks = cfg.head_blocks;
  o.dropout = cfg.dropout;
  o.layers = cfg.backbone_layers;
  return o;
}

SemanticDiscriminator::SemanticDiscriminator(const Options &options,
                                             std::unique_ptr<Backbone> backbone,
                                             uint64_t seed)
    : options_(options), backbone_(std::move(backbone)) {
  if (backbone_->Width() != options.width)
    throw DimensionError("backbone width does not match the adapter width");
  for (int l : options.layers)
    if (l < 1 || l > backbone_->Depth()) throw MissingLayerError(l);
  Rng rng(seed);
  adapter_ = Adapter(options.input_dim, options.width, options.dropout, rng);
  positions_ = {"disc.positions",
                ScaledNormal(options.seq_len, options.width, 0.1, rng)};
  pooling_ = AttentivePooling(options.width, options.heads, rng);
  combination_ = LayerCombination(options.layers, options.width, rng);
  const int pooled = options.heads * options.width;
  head_in_ = SpectralLinear("disc.head.in", pooled, options.head_hidden, true, rng);
  for (int b = 0; b < options.head_blocks; ++b)
    head_blocks_.emplace_back("disc.head.block" + std::to_string(b),
                              options.head_hidden, options.head_hidden, true, rng);
  head_out_ = SpectralLinear("disc.head.out", options.head_hidden, 1, true, rng);
}

SemanticDiscriminator::SemanticDiscriminator(const ExperimentConfig &cfg,
                                             uint64_t seed)
    : SemanticDiscriminator(
          Options::FromConfig(cfg),
          std::make_unique<StubBackbone>(cfg.disc_hidden, cfg.backbone_depth,
                                         MixSeed(seed, 1)),
          MixSeed(seed, 2)) {}

nn::Var SemanticDiscriminator::Features(nn::Graph &graph, const nn::Var &e,
                                        bool training, Rng &dropout_rng,
                                        AttentionTrace *trace) {
  const int batch = static_cast<int>(e.rows());
  nn::Var adapted = adapter_.Forward(graph, e, training, dropout_rng);
  nn::Var seq = nn::Add(nn::RepeatRows(adapted, options_.seq_len),
                        nn::TileRows(graph.Param(positions_), batch));
  std::map<int, nn::Var> states =
      backbone_->Forward(graph, seq, combination_.layers());
  return combination_.Forward(graph, states, pooling_, options_.seq_len, trace);
}

nn::Var SemanticDiscriminator::Forward(nn::Graph &graph, const nn::Var &e,
                                       bool training, Rng &dropout_rng,
                                       AttentionTrace *trace) {
  nn::Var h = nn::LeakyRelu(
      head_in_.Forward(graph, Features(graph, e, training, dropout_rng, trace)));
  for (SpectralLinear &block : head_blocks_) {
    nn::Var r = nn::LeakyRelu(block.Forward(graph, h));
    h = nn::Add(h, nn::Dropout(r, options_.dropout, training, dropout_rng));
  }
  return nn::Sigmoid(head_out_.Forward(graph, h));
}

std::vector<nn::Parameter *> SemanticDiscriminator::Parameters() {
  std::vector<nn::Parameter *> p = adapter_.Parameters();
  p.push_back(&positions_);
  for (nn::Parameter *q : pooling_.Parameters()) p.push_back(q);
  for (nn::Parameter *q : combination_.Parameters()) p.push_back(q);
  for (nn::Parameter *q : head_in_.Parameters()) p.push_back(q);
  for (SpectralLinear &b : head_blocks_)
    for (nn::Parameter *q : b.Parameters()) p.push_back(q);
  for (nn::Parameter *q : head_out_.Parameters()) p.push_back(q);
  return p;
}

std::vector<nn::Buffer> SemanticDiscriminator::Buffers() {
  std::vector<nn::Buffer> b = adapter_.Buffers();
  for (const nn::Buffer &x : combination_.Buffers()) b.push_back(x);
  for (const nn::Buffer &x : head_in_.Buffers()) b.push_back(x);
  for (SpectralLinear &l : head_blocks_)
    for (const nn::Buffer &x : l.Buffers()) b.push_back(x);
  for (const nn::Buffer &x : head_out_.Buffers()) b.push_back(x);
  return b;
}

void SemanticDiscriminator::PowerIterate() {
  adapter_.PowerIterate();
  combination_.PowerIterate();
  head_in_.PowerIterate();
  for (SpectralLinear &l : head_blocks_) l.PowerIterate();
  head_out_.PowerIterate();
}

std::vector<const Matrix *> SemanticDiscriminator::FrozenWeights() const {
  std::vector<const Matrix *> w;
  if (auto *stub = dynamic_cast<const StubBackbone *>(backbone_.get()))
    for (int l = 1; l <= stub->Depth(); ++l) w.push_back(&stub->mix(l));
  return w;
}

PlainDiscriminator::PlainDiscriminator(int input_dim, int hidden,
                                       double dropout, uint64_t seed)
    : dropout_(dropout) {
  Rng rng(seed);
  fc1_ = SpectralLinear("disc.fc1", input_dim, hidden, true, rng);
  fc2_ = SpectralLinear("disc.fc2", hidden, hidden, true, rng);
  fc3_ = SpectralLinear("disc.fc3", hidden, 1, true, rng);
}

nn::Var PlainDiscriminator::Forward(nn::Graph &graph, const nn::Var &e,
                                    bool training, Rng &dropout_rng,
                                    AttentionTrace *) {
  nn::Var h = nn::LeakyRelu(fc1_.Forward(graph, e));
  h = nn::Dropout(h, dropout_, training, dropout_rng);
  h = nn::LeakyRelu(fc2_.Forward(graph, h));
  h = nn::Dropout(h, dropout_, training, dropout_rng);
  return nn::Sigmoid(fc3_.Forward(graph, h));
}

std::vector<nn::Parameter *> PlainDiscriminator::Parameters() {
  std::vector<nn::Parameter *> p;
  for (SpectralLinear *l : {&fc1_, &fc2_, &fc3_})
    for (nn::Parameter *q : l->Parameters()) p.push_back(q);
  return p;
}

std::vector<nn::Buffer> PlainDiscriminator::Buffers() {
  std::vector<nn::Buffer> b;
  for (SpectralLinear *l : {&fc1_, &fc2_, &fc3_})
    for (const nn::Buffer &x : l->Buffers()) b.push_back(x);
  return b;
}

void PlainDiscriminator::PowerIterate() {
  fc1_.PowerIterate();
  fc2_.PowerIterate();
  fc3_.PowerIterate();
}

std::unique_ptr<Discriminator> MakeDiscriminator(const ExperimentConfig &cfg,
                                                 uint64_t seed) {
  if (!ModeUsesAdversary(cfg.mode)) return nullptr;
  if (ModeUsesSemanticDiscriminator(cfg.mode))
    return std::make_unique<SemanticDiscriminator>(cfg, seed);
  return std::make_unique<PlainDiscriminator>(cfg.embed_dim, cfg.disc_hidden,
                                              cfg.dropout, seed);
}

}  // namespace classaug

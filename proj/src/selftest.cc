// selftest.cc

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

#include "classaug/selftest.h"

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include <Eigen/SVD>

#include "classaug/config.h"
#include "classaug/discriminator.h"
#include "classaug/encoder.h"
#include "classaug/errors.h"
#include "classaug/eval.h"
#include "classaug/fbank.h"
#include "classaug/gradcheck.h"
#include "classaug/losses.h"
#include "classaug/mixup.h"
#include "classaug/rng.h"

namespace classaug {

namespace {

constexpr uint64_t kSeed = 20261018;

Matrix RandomMatrix(int rows, int cols, Rng &rng, double stddev = 1.0) {
  return ScaledNormal(rows, cols, stddev, rng);
}

// A batch with at least two distinct labels among num_classes.
EmbeddingBatch RandomBatch(int size, int num_classes, int dim, Rng &rng) {
  EmbeddingBatch b;
  b.embeddings = RandomMatrix(size, dim, rng);
  do {
    b.labels.clear();
    for (int i = 0; i < size; ++i)
      b.labels.push_back(static_cast<int>(rng.UniformInt(0, num_classes - 1)));
  } while (std::set<int>(b.labels.begin(), b.labels.end()).size() < 2);
  return b;
}

std::string Fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

PropertyResult Check(const std::string &name, bool ok, std::string detail) {
  return {name, ok, ok ? "" : std::move(detail)};
}

PropertyResult MixupInvariants(const std::string &name,
                               const std::string &invariant) {
  Rng rng(kSeed);
  for (int trial = 0; trial < 50; ++trial) {
    const int c = static_cast<int>(rng.UniformInt(2, 8));
    EmbeddingBatch batch = RandomBatch(static_cast<int>(rng.UniformInt(2, 16)),
                                       c, 6, rng);
    ClassifierWeights w{RandomMatrix(6, c, rng)};
    std::string err = CheckSyntheticBatch(batch, w, SlMixup(batch, w));
    if (!err.empty() && err.rfind(invariant, 0) == 0) return {name, false, err};
  }
  return {name, true, ""};
}

PropertyResult MixupDeterminism() {
  Rng rng(kSeed + 1);
  EmbeddingBatch batch = RandomBatch(12, 5, 4, rng);
  ClassifierWeights w{RandomMatrix(4, 5, rng)};
  SyntheticBatch a = SlMixup(batch, w), b = SlMixup(batch, w);
  bool same = a.embeddings == b.embeddings && a.labels == b.labels &&
              a.weights == b.weights && a.pair_map == b.pair_map;
  return Check("mixup_determinism", same, "two calls differ");
}

PropertyResult MixupOracle() {
  Rng rng(kSeed + 2);
  for (int trial = 0; trial < 50; ++trial) {
    const int c = static_cast<int>(rng.UniformInt(2, 6));
    const int n = static_cast<int>(rng.UniformInt(2, 10));
    EmbeddingBatch batch = RandomBatch(n, c, 3, rng);
    ClassifierWeights w{RandomMatrix(3, c, rng)};
    SyntheticBatch syn = SlMixup(batch, w);
    std::vector<std::pair<int, int>> registry;
    for (int i = 0; i < n; ++i) {
      int l1 = batch.labels[i], l2 = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int j : batch.labels) {
        if (j == l1) continue;
        double d = (w.w.col(l1) - w.w.col(j)).norm();
        if (d < best || (d == best && j < l2)) best = d, l2 = j;
      }
      int partner = 0;
      while (batch.labels[partner] != l2) ++partner;
      RowVector e = 0.5 * batch.embeddings.row(i) + 0.5 * batch.embeddings.row(partner);
      Vector col = 0.5 * w.w.col(l1) + 0.5 * w.w.col(l2);
      std::pair<int, int> key{std::min(l1, l2), std::max(l1, l2)};
      auto it = std::find(registry.begin(), registry.end(), key);
      if (it == registry.end()) it = registry.insert(registry.end(), key);
      const int label = c + static_cast<int>(it - registry.begin());
      if (e != syn.embeddings.row(i) || col != syn.weights.col(i) ||
          label != syn.labels[i])
        return {"mixup_bruteforce_oracle", false,
                "row " + std::to_string(i) + " of trial " + std::to_string(trial)};
    }
  }
  return {"mixup_bruteforce_oracle", true, ""};
}

PropertyResult AmSoftmaxClosedForm() {
  Matrix logits(1, 2);
  logits << 1.0, 0.0;
  const int t[] = {0};
  double a = AmSoftmax(logits, t, 1.0, 0.0);
  double b = AmSoftmax(logits, t, 1.0, 0.2);
  double want_a = std::log(1.0 + std::exp(-1.0));
  double want_b = -std::log(std::exp(0.8) / (std::exp(0.8) + 1.0));
  bool ok = std::abs(a - want_a) < 1e-12 && std::abs(b - want_b) < 1e-12;
  return Check("am_softmax_closed_form", ok, Fmt(a) + ", " + Fmt(b));
}

PropertyResult AmSoftmaxSoftmaxEquivalence() {
  Rng rng(kSeed + 3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix logits = RandomMatrix(5, 7, rng, 0.5).array().tanh().matrix();
    std::vector<int> t;
    for (int i = 0; i < 5; ++i) t.push_back(static_cast<int>(rng.UniformInt(0, 6)));
    const double s = 10.0;
    double ce = 0.0;
    for (int i = 0; i < 5; ++i) {
      RowVector z = s * logits.row(i);
      ce += std::log((z.array() - z.maxCoeff()).exp().sum()) + z.maxCoeff() - z(t[i]);
    }
    worst = std::max(worst, std::abs(ce / 5.0 - AmSoftmax(logits, t, s, 0.0)));
  }
  return Check("am_softmax_zero_margin_is_cross_entropy", worst < 1e-10, Fmt(worst));
}

PropertyResult LossGradients() {
  Rng rng(kSeed + 4);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix logits = RandomMatrix(4, 5, rng, 0.5).array().tanh().matrix();
    std::vector<int> t{0, 3, 1, 4};
    worst = std::max(worst, nn::CheckInputGradients(
        [&](nn::Graph &, const std::vector<nn::Var> &in) {
          return nn::AmSoftmaxLoss(in[0], t, 30.0, 0.2);
        }, {logits}).relative_error);
    Matrix p = (RandomMatrix(3, 1, rng).array() * 0.8).unaryExpr(
        [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    Matrix q = (RandomMatrix(2, 1, rng).array() * 0.8).unaryExpr(
        [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    worst = std::max(worst, nn::CheckInputGradients(
        [](nn::Graph &, const std::vector<nn::Var> &in) {
          return nn::Add(nn::DiscriminatorLoss(in[0], in[1]),
                         nn::GeneratorLoss(in[0], in[1]));
        }, {p, q}).relative_error);
  }
  return Check("loss_gradients", worst < 1e-4, Fmt(worst));
}

PropertyResult BceValues() {
  bool ok = std::abs(Bce(0.5, 1) - std::log(2.0)) < 1e-12 &&
            std::abs(Bce(0.9, 0) + std::log(0.1)) < 1e-12 &&
            std::abs(Bce(1.0, 1) - 1e-7) < 1e-12 && std::isfinite(Bce(0.0, 1));
  return Check("bce_values", ok, "bce reference values differ");
}

PropertyResult AdversarialSymmetry() {
  Rng rng(kSeed + 5);
  for (int trial = 0; trial < 20; ++trial) {
    Vector a = Vector::NullaryExpr(4, [&] { return rng.Uniform(); });
    Vector b = Vector::NullaryExpr(3, [&] { return rng.Uniform(); });
    if (GeneratorLoss(a, b) != DiscriminatorLoss(b, a))
      return {"generator_discriminator_symmetry", false, "asymmetric"};
  }
  return {"generator_discriminator_symmetry", true, ""};
}

PropertyResult LambdaBounds() {
  Rng rng(kSeed + 6);
  LambdaRule rule;
  double ema = 1.0;
  for (int step = 0; step < 1000; ++step) {
    double l_real = std::exp(6.0 * rng.Uniform() - 3.0);
    double l_g = step % 97 == 0 ? 0.0 : std::exp(6.0 * rng.Uniform() - 3.0);
    LambdaUpdate u = AdaptLambda(l_real, l_g, ema, rule);
    if (!(u.lambda_adv >= rule.min && u.lambda_adv <= rule.max))
      return {"adapt_lambda_bounds", false, "lambda " + Fmt(u.lambda_adv)};
    ema = u.ratio_ema;
  }
  return {"adapt_lambda_bounds", true, ""};
}

PropertyResult SpectralSigma() {
  Rng rng(kSeed + 7);
  Matrix m = RandomMatrix(8, 8, rng);
  Vector u = RandomMatrix(8, 1, rng).col(0);
  Matrix normalized;
  for (int i = 0; i < 50; ++i) normalized = SpectralNormalizeMatrix(m, &u);
  double exact = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  double estimate = exact / Eigen::JacobiSVD<Matrix>(normalized).singularValues()(0);
  bool ok = std::abs(estimate - exact) < 1e-3 * exact;
  return Check("spectral_norm_estimate", ok, Fmt(estimate) + " vs " + Fmt(exact));
}

SemanticDiscriminator TinyDiscriminator() {
  SemanticDiscriminator::Options o;
  o.input_dim = 8;
  o.width = 16;
  o.heads = 2;
  o.seq_len = 4;
  o.head_hidden = 8;
  o.head_blocks = 1;
  o.layers = {1, 2};
  return SemanticDiscriminator(o, std::make_unique<StubBackbone>(16, 2, kSeed),
                               kSeed + 8);
}

PropertyResult AttentionSums() {
  SemanticDiscriminator d = TinyDiscriminator();
  Rng rng(kSeed + 9);
  nn::Graph g;
  AttentionTrace trace;
  d.Forward(g, g.Constant(RandomMatrix(6, 8, rng)), true, rng, &trace);
  bool ok = trace.groups > 0 && trace.max_sum_error <= 1e-6 && trace.min_weight >= 0;
  return Check("attention_weights_sum_to_one", ok, Fmt(trace.max_sum_error));
}

PropertyResult DiscriminatorGradient() {
  SemanticDiscriminator d = TinyDiscriminator();
  Rng rng(kSeed + 10);
  Matrix e = RandomMatrix(3, 8, rng);
  Rng unused(0);
  nn::GradCheckResult r = nn::CheckParameterGradients(
      [&](nn::Graph &g) {
        return nn::Mean(d.Forward(g, g.Constant(e), false, unused));
      },
      d.Parameters());
  nn::GradCheckResult ri = nn::CheckInputGradients(
      [&](nn::Graph &g, const std::vector<nn::Var> &in) {
        return nn::Mean(d.Forward(g, in[0], false, unused));
      }, {e});
  double worst = std::max(r.relative_error, ri.relative_error);
  return Check("discriminator_gradient", worst < 1e-3, Fmt(worst));
}

// Exhaustive threshold sweep written independently of RocPoints.
double OracleEer(const std::vector<double> &s, const std::vector<bool> &y) {
  std::vector<double> th{std::numeric_limits<double>::infinity()};
  std::set<double, std::greater<double>> uniq(s.begin(), s.end());
  th.insert(th.end(), uniq.begin(), uniq.end());
  int nt = 0, nn_ = 0;
  for (bool b : y) (b ? nt : nn_)++;
  double pfar = 0, pfrr = 1;
  for (double t : th) {
    int fa = 0, fr = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      if (y[i] && s[i] < t) ++fr;
      if (!y[i] && s[i] >= t) ++fa;
    }
    double far = static_cast<double>(fa) / nn_, frr = static_cast<double>(fr) / nt;
    if (far >= frr) {
      if (far == frr) return far;
      double da = pfar - pfrr, db = far - frr;
      return pfar + (-da / (db - da)) * (far - pfar);
    }
    pfar = far;
    pfrr = frr;
  }
  return 1.0;
}

PropertyResult EerOracle() {
  Rng rng(kSeed + 11);
  for (int trial = 0; trial < 200; ++trial) {
    ScoredTrials st;
    const int n = static_cast<int>(rng.UniformInt(2, 10));
    for (int i = 0; i < n; ++i) {
      st.scores.push_back(std::round(rng.Uniform() * 6.0) / 6.0);
      st.labels.push_back(i == 0 ? true : i == 1 ? false : rng.Uniform() < 0.5);
    }
    double got = ComputeEer(st).eer, want = OracleEer(st.scores, st.labels);
    if (got != want)
      return {"eer_bruteforce_oracle", false, Fmt(got) + " vs " + Fmt(want)};
  }
  return {"eer_bruteforce_oracle", true, ""};
}

PropertyResult MinDcfRange() {
  Rng rng(kSeed + 12);
  for (int trial = 0; trial < 100; ++trial) {
    ScoredTrials st;
    for (int i = 0; i < 20; ++i) {
      st.scores.push_back(rng.Normal());
      st.labels.push_back(i % 2 == 0);
    }
    double v = ComputeMinDcf(st, 0.01, 1.0, 1.0);
    double e = ComputeEer(st).eer;
    if (!(v >= 0 && v <= 1 && e >= 0 && e <= 1))
      return {"metric_ranges", false, Fmt(v) + ", " + Fmt(e)};
  }
  return {"metric_ranges", true, ""};
}

PropertyResult FbankDftOracle() {
  ExperimentConfig cfg;
  cfg.fbank_dims = 24;
  Rng rng(kSeed + 13);
  std::vector<double> wav(1200);
  for (double &x : wav) x = 0.3 * rng.Normal();
  FbankMatrix fb = ExtractFbank(wav, cfg);
  const int win = cfg.WindowSamples(), hop = cfg.HopSamples(), n = cfg.fft_size;
  Matrix mel = MelFilterbank(n, cfg.sample_rate, cfg.fbank_dims, cfg.mel_low_hz,
                             cfg.mel_high_hz);
  std::vector<double> ham = HammingWindow(win);
  double worst = 0.0;
  for (int t = 0; t < fb.NumFrames(); ++t) {
    RowVector power(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < win; ++i)
        acc += wav[t * hop + i] * ham[i] *
               std::polar(1.0, -2.0 * std::numbers::pi * k * i / n);
      power(k) = std::norm(acc);
    }
    RowVector energy = power * mel;
    for (int b = 0; b < cfg.fbank_dims; ++b)
      worst = std::max(worst, std::abs(std::log(std::max(energy(b), 1e-10)) -
                                       fb.frames(t, b)));
  }
  return Check("fbank_dft_oracle", worst < 1e-8, Fmt(worst));
}

PropertyResult ConfigRoundTrip() {
  ExperimentConfig cfg;
  cfg.margin = 0.123456789012345;
  cfg.backbone_layers = {2, 5};
  cfg.mode = TrainMode::kAtSd;
  cfg.seed = 77;
  return Check("config_roundtrip", ParseConfig(ConfigToString(cfg)) == cfg,
               "reparsed config differs");
}

}  // namespace

std::vector<PropertyResult> RunSelfTest() {
  const std::vector<std::pair<std::string, std::function<PropertyResult()>>> checks{
      {"mixup_midpoint", [] { return MixupInvariants("mixup_midpoint", "midpoint"); }},
      {"mixup_label_disjointness", [] {
         return MixupInvariants("mixup_label_disjointness", "label_disjointness");
       }},
      {"mixup_pair_registry", [] {
         return MixupInvariants("mixup_pair_registry", "pair_registry");
       }},
      {"mixup_determinism", MixupDeterminism},
      {"mixup_bruteforce_oracle", MixupOracle},
      {"am_softmax_closed_form", AmSoftmaxClosedForm},
      {"am_softmax_zero_margin_is_cross_entropy", AmSoftmaxSoftmaxEquivalence},
      {"loss_gradients", LossGradients},
      {"bce_values", BceValues},
      {"generator_discriminator_symmetry", AdversarialSymmetry},
      {"adapt_lambda_bounds", LambdaBounds},
      {"spectral_norm_estimate", SpectralSigma},
      {"attention_weights_sum_to_one", AttentionSums},
      {"discriminator_gradient", DiscriminatorGradient},
      {"eer_bruteforce_oracle", EerOracle},
      {"metric_ranges", MinDcfRange},
      {"fbank_dft_oracle", FbankDftOracle},
      {"config_roundtrip", ConfigRoundTrip},
  };
  std::vector<PropertyResult> results;
  for (const auto &[name, check] : checks) {
    try {
      results.push_back(check());
    } catch (const std::exception &e) {
      results.push_back({name, false, e.what()});
    }
  }
  return results;
}

}  // namespace classaug

// trainer.cc

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

#include "classaug/trainer.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "json.hpp"

#include "classaug/checkpoint.h"
#include "classaug/corpus.h"
#include "classaug/errors.h"
#include "classaug/logging.h"
#include "classaug/mixup.h"

namespace classaug {

namespace fs = std::filesystem;

namespace {

enum SeedStream : uint64_t {
  kEncoderStream = 1,
  kHeadStream = 2,
  kDiscriminatorStream = 3,
  kDataStream = 10,
  kModelStream = 11,
};

ReferenceEncoder::Options EncoderOptions(const ExperimentConfig &cfg) {
  ReferenceEncoder::Options o;
  o.input_dim = cfg.fbank_dims;
  o.channels = cfg.encoder_channels;
  o.embed_dim = cfg.embed_dim;
  return o;
}

}  // namespace

Trainer::Trainer(const ExperimentConfig &cfg, int num_classes)
    : cfg_(ValidateConfig(cfg)),
      num_classes_(num_classes),
      encoder_(EncoderOptions(cfg), MixSeed(cfg.seed, kEncoderStream)),
      head_(cfg.embed_dim, num_classes, MixSeed(cfg.seed, kHeadStream)),
      discriminator_(
          MakeDiscriminator(cfg, MixSeed(cfg.seed, kDiscriminatorStream))) {
  if (num_classes < 2)
    throw ValidationError("num_classes", "training needs at least two classes");
  encoder_opt_ = nn::AdamW(ModelParameters(), {.weight_decay = cfg.weight_decay});
  if (discriminator_)
    disc_opt_ = nn::AdamW(discriminator_->Parameters(),
                          {.weight_decay = cfg.weight_decay});
  state_.data_rng = Rng(MixSeed(cfg.seed, kDataStream));
  state_.model_rng = Rng(MixSeed(cfg.seed, kModelStream));
}

std::vector<nn::Parameter *> Trainer::ModelParameters() {
  std::vector<nn::Parameter *> p = encoder_.Parameters();
  for (nn::Parameter *q : head_.Parameters()) p.push_back(q);
  return p;
}

std::vector<nn::Buffer> Trainer::NamedTensors() {
  std::vector<nn::Buffer> out;
  for (nn::Parameter *p : ModelParameters()) out.push_back({p->name, &p->value});
  if (discriminator_) {
    for (nn::Parameter *p : discriminator_->Parameters())
      out.push_back({p->name, &p->value});
    for (const nn::Buffer &b : discriminator_->Buffers()) out.push_back(b);
  }
  return out;
}

double Trainer::EncoderLr() const {
  return nn::WarmupLr(cfg_.lr_encoder, encoder_opt_.steps() + 1,
                      cfg_.warmup_steps);
}

double Trainer::DiscriminatorLr() const {
  return discriminator_ ? cfg_.lr_discriminator : 0.0;
}

double Trainer::SyntheticWeight() const {
  const int lambda = cfg_.lambda_speakers > 0 ? cfg_.lambda_speakers : num_classes_;
  return cfg_.syn_loss_weight / static_cast<double>(lambda);
}

LossReport Trainer::Step(std::span<const FbankMatrix> features,
                         std::span<const int> labels,
                         StepDiagnostics *diagnostics) {
  if (features.size() != labels.size() || features.empty())
    throw DimensionError("train step: features and labels differ in count");
  StepDiagnostics local;
  StepDiagnostics &diag = diagnostics ? *diagnostics : local;
  diag = StepDiagnostics();
  diag.num_real_classes = num_classes_;
  diag.syn_weight = SyntheticWeight();

  LossReport report;
  report.ratio_ema = state_.ratio_ema;

  nn::Graph graph;
  nn::Var e = encoder_.ForwardBatch(graph, features);
  nn::Var w = graph.Param(head_.weight());
  nn::Var l_real =
      nn::AmSoftmaxLoss(CosineLogits(e, w), labels, cfg_.scale, cfg_.margin);
  report.l_real = l_real.scalar();
  report.lambda_adv = state_.lambda_adv;
  nn::Var l_syn, l_g;

  const bool wants_mixup = ModeUsesSyntheticLoss(cfg_.mode) || discriminator_;
  const std::set<int> distinct(labels.begin(), labels.end());
  diag.single_class = distinct.size() < 2;
  if (wants_mixup && diag.single_class) {
    CLASSAUG_WARN << "step " << state_.step + 1
                  << ": single-class batch, synthetic and adversarial terms "
                     "skipped";
  }

  if (wants_mixup && !diag.single_class) {
    EmbeddingBatch real{e.value(), {labels.begin(), labels.end()}, false};
    const ClassifierWeights weights = head_.Weights();
    SyntheticBatch syn = SlMixup(real, weights);
    diag.mixup_ran = true;
    diag.min_synthetic_label =
        *std::min_element(syn.labels.begin(), syn.labels.end());
    diag.mixup_violation = CheckSyntheticBatch(real, weights, syn);
    nn::Var e_syn = SyntheticEmbeddings(e, syn);

    if (discriminator_) {
      // Discriminator update on detached embeddings.
      discriminator_->PowerIterate();
      disc_opt_.ZeroGrad();
      nn::Graph dgraph;
      nn::Var d_real = discriminator_->Forward(
          dgraph, dgraph.Constant(e.value()), true, state_.model_rng,
          &diag.attention);
      nn::Var d_syn = discriminator_->Forward(
          dgraph, dgraph.Constant(syn.embeddings), true, state_.model_rng,
          &diag.attention);
      nn::Var l_d = nn::DiscriminatorLoss(d_real, d_syn);
      dgraph.Backward(l_d);
      nn::ClipGradNorm(discriminator_->Parameters(), cfg_.grad_clip);
      disc_opt_.Step(cfg_.lr_discriminator);
      report.l_d = l_d.scalar();

      // Generator loss through the live encoder graph. The gradients it
      // leaves on the discriminator are cleared before its next update.
      nn::Var g_real = discriminator_->Forward(graph, e, true, state_.model_rng,
                                               &diag.attention);
      nn::Var g_syn = discriminator_->Forward(graph, e_syn, true,
                                              state_.model_rng, &diag.attention);
      l_g = nn::GeneratorLoss(g_real, g_syn, cfg_.generator_real_term);
      report.l_g = l_g.scalar();

      LambdaUpdate u = AdaptLambda(report.l_real, report.l_g, state_.ratio_ema,
                                   LambdaRule::FromConfig(cfg_));
      state_.ratio_ema = u.ratio_ema;
      state_.lambda_adv = u.lambda_adv;
      report.ratio_ema = u.ratio_ema;
      report.lambda_adv = u.lambda_adv;
    }

    if (ModeUsesSyntheticLoss(cfg_.mode)) {
      nn::Var w_syn = SyntheticClassWeights(w, syn);
      l_syn = nn::SyntheticLoss(e_syn, w, w_syn, syn.labels,
                                        num_classes_, cfg_.scale, cfg_.margin,
                                        cfg_.syn_against_real);
      report.l_syn = l_syn.scalar();
    }
  }
  nn::Var total = l_real;
  if (l_syn.graph()) total = nn::Add(total, nn::Scale(l_syn, diag.syn_weight));
  if (l_g.graph()) total = nn::Add(total, nn::Scale(l_g, report.lambda_adv));
  report.l_total = total.scalar();

  const double lr = EncoderLr();
  encoder_opt_.ZeroGrad();
  graph.Backward(total);
  nn::ClipGradNorm(ModelParameters(), cfg_.grad_clip);
  encoder_opt_.Step(lr);
  if (discriminator_) disc_opt_.ZeroGrad();
  ++state_.step;
  return report;
}

TrainingData LoadTrainingData(const ExperimentConfig &cfg,
                              const Manifest &manifest) {
  TrainingData data;
  std::set<std::string> names;
  for (const ManifestEntry &m : manifest) names.insert(m.speaker);
  data.speakers.assign(names.begin(), names.end());
  FbankExtractor extractor(cfg);
  for (const ManifestEntry &m : manifest) {
    std::vector<double> wav = LoadWaveform(m.source, cfg.sample_rate);
    data.features.push_back(extractor.Compute(wav));
    data.labels.push_back(static_cast<int>(
        std::lower_bound(data.speakers.begin(), data.speakers.end(), m.speaker) -
        data.speakers.begin()));
  }
  return data;
}

std::vector<std::vector<int>> EpochBatches(int num_items, int batch_size,
                                           Rng &rng) {
  std::vector<int> order(num_items);
  for (int i = 0; i < num_items; ++i) order[i] = i;
  for (int i = num_items - 1; i > 0; --i)
    std::swap(order[i], order[rng.UniformInt(0, i)]);
  std::vector<std::vector<int>> batches;
  for (int start = 0; start + batch_size <= num_items; start += batch_size)
    batches.emplace_back(order.begin() + start,
                         order.begin() + start + batch_size);
  return batches;
}

std::string MetricsRecord(int64_t step, int epoch, const LossReport &r,
                          double lr_encoder, double lr_discriminator) {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["epoch"] = epoch;
  j["l_real"] = r.l_real;
  j["l_syn"] = r.l_syn;
  j["l_d"] = r.l_d;
  j["l_g"] = r.l_g;
  j["l_total"] = r.l_total;
  j["lambda_adv"] = r.lambda_adv;
  j["ratio_ema"] = r.ratio_ema;
  j["lr_enc"] = lr_encoder;
  j["lr_disc"] = lr_discriminator;
  return j.dump();
}

namespace {

std::string EpochDirName(int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "epoch-%03d", epoch);
  return buf;
}

// Keeps the records with step <= last_step.
void TruncateMetrics(const std::string &path, int64_t last_step) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read metrics log " + path);
  std::vector<std::string> keep;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (j.at("step").get<int64_t>() <= last_step) keep.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const std::string &l : keep) out << l << '\n';
  if (!out) throw IoError("cannot rewrite metrics log " + path);
}

}  // namespace

TrainResult Train(const ExperimentConfig &cfg, const TrainingData &data,
                  const TrainOptions &options,
                  std::unique_ptr<Trainer> *trainer_out) {
  if (data.Size() < cfg.batch_size)
    throw ValidationError("batch_size", "larger than the training set");
  auto trainer = std::make_unique<Trainer>(cfg, data.NumClasses());
  fs::create_directories(options.out_dir);
  TrainResult result;
  result.metrics_path = (fs::path(options.out_dir) / "metrics.jsonl").string();

  if (!options.resume_from.empty()) {
    LoadCheckpoint(options.resume_from, trainer.get());
    TruncateMetrics(result.metrics_path, trainer->state().step);
    CLASSAUG_LOG << "resumed from " << options.resume_from << " at epoch "
                 << trainer->state().epoch << ", step " << trainer->state().step;
  } else {
    std::ofstream(result.metrics_path, std::ios::trunc);
  }
  std::ofstream metrics(result.metrics_path, std::ios::app);
  if (!metrics) throw IoError("cannot open " + result.metrics_path);

  const int frames = SegmentFrames(cfg);
  const int last_epoch = options.stop_after_epoch > 0
                             ? std::min(options.stop_after_epoch, cfg.epochs)
                             : cfg.epochs;
  TrainState &state = trainer->state();
  while (state.epoch < last_epoch) {
    const int epoch = state.epoch + 1;
    std::vector<std::vector<int>> batches =
        EpochBatches(data.Size(), cfg.batch_size, state.data_rng);
    double epoch_loss = 0.0;
    for (const std::vector<int> &batch : batches) {
      std::vector<FbankMatrix> feats;
      std::vector<int> labels;
      for (int i : batch) {
        feats.push_back(RandomFrameCrop(data.features[i], frames, state.data_rng));
        labels.push_back(data.labels[i]);
      }
      const double lr_enc = trainer->EncoderLr();
      StepDiagnostics diag;
      LossReport report = trainer->Step(feats, labels, &diag);
      metrics << MetricsRecord(state.step, epoch, report, lr_enc,
                               trainer->DiscriminatorLr())
              << '\n';
      epoch_loss += report.l_total;
      ++result.steps_run;
      if (options.observer) options.observer(*trainer, report, diag);
    }
    metrics.flush();
    if (!metrics) throw IoError("metrics write failed: " + result.metrics_path);
    state.epoch = epoch;
    CLASSAUG_LOG << "epoch " << epoch << " mean l_total "
                 << epoch_loss / std::max<size_t>(1, batches.size());
    if (options.write_checkpoints) {
      result.last_checkpoint = (fs::path(options.out_dir) / "checkpoints" /
                                EpochDirName(epoch)).string();
      SaveCheckpoint(*trainer, result.last_checkpoint);
    }
  }
  result.state = trainer->state();
  if (trainer_out) *trainer_out = std::move(trainer);
  return result;
}

}  // namespace classaug

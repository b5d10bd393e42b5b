// classaug/trainer.h

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

#ifndef CLASSAUG_TRAINER_H_
#define CLASSAUG_TRAINER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "classaug/config.h"
#include "classaug/discriminator.h"
#include "classaug/encoder.h"
#include "classaug/fbank.h"
#include "classaug/losses.h"
#include "classaug/optim.h"
#include "classaug/rng.h"
#include "classaug/types.h"

namespace classaug {

/// Everything besides the weights that a resumed run needs.
struct TrainState {
  int64_t step = 0;   // completed train steps
  int epoch = 0;      // completed epochs
  double ratio_ema = 1.0;
  double lambda_adv = 0.0;
  Rng data_rng;       // shuffling and segment offsets
  Rng model_rng;      // dropout

  bool operator==(const TrainState &) const = default;
};

/// Per-step facts checked by the invariant sweep.
struct StepDiagnostics {
  bool mixup_ran = false;
  bool single_class = false;
  int num_real_classes = 0;
  int min_synthetic_label = -1;
  /// Empty, or the first violated synthetic-batch invariant.
  std::string mixup_violation;
  AttentionTrace attention;
  double syn_weight = 0.0;
};

/// The encoder, classification head, optional discriminator, their
/// optimizers and the training state. One object drives one run.
class Trainer {
 public:
  Trainer(const ExperimentConfig &cfg, int num_classes);
  Trainer(const Trainer &) = delete;
  Trainer &operator=(const Trainer &) = delete;

  /// One alternating update on a batch of feature segments. Batches with a
  /// single distinct label skip mixup and the adversarial game.
  LossReport Step(std::span<const FbankMatrix> features,
                  std::span<const int> labels,
                  StepDiagnostics *diagnostics = nullptr);

  /// Encoder learning rate used by the next step.
  double EncoderLr() const;
  double DiscriminatorLr() const;
  /// Weight of the synthetic loss inside the total loss (syn_loss_weight
  /// divided by the class count).
  double SyntheticWeight() const;

  const ExperimentConfig &config() const { return cfg_; }
  int num_classes() const { return num_classes_; }
  ReferenceEncoder &encoder() { return encoder_; }
  ClassificationHead &head() { return head_; }
  Discriminator *discriminator() { return discriminator_.get(); }
  nn::AdamW &encoder_optimizer() { return encoder_opt_; }
  nn::AdamW *discriminator_optimizer() {
    return discriminator_ ? &disc_opt_ : nullptr;
  }
  TrainState &state() { return state_; }
  const TrainState &state() const { return state_; }

  /// Encoder and head parameters, in optimizer order.
  std::vector<nn::Parameter *> ModelParameters();
  /// Every saved tensor: model and discriminator parameters plus the
  /// discriminator's power-iteration vectors.
  std::vector<nn::Buffer> NamedTensors();

 private:
  ExperimentConfig cfg_;
  int num_classes_;
  ReferenceEncoder encoder_;
  ClassificationHead head_;
  std::unique_ptr<Discriminator> discriminator_;
  nn::AdamW encoder_opt_;
  nn::AdamW disc_opt_;
  TrainState state_;
};

/// Full-utterance features and integer labels of a training manifest.
/// Speakers are numbered in sorted name order.
struct TrainingData {
  std::vector<FbankMatrix> features;
  std::vector<int> labels;
  std::vector<std::string> speakers;

  int NumClasses() const { return static_cast<int>(speakers.size()); }
  int Size() const { return static_cast<int>(labels.size()); }
};

TrainingData LoadTrainingData(const ExperimentConfig &cfg,
                              const Manifest &manifest);

/// Utterance indices of each batch of one epoch: a shuffle drawn from rng,
/// cut into full batches; the remainder is dropped.
std::vector<std::vector<int>> EpochBatches(int num_items, int batch_size,
                                           Rng &rng);

/// One metrics-log record.
std::string MetricsRecord(int64_t step, int epoch, const LossReport &report,
                          double lr_encoder, double lr_discriminator);

struct TrainOptions {
  std::string out_dir;
  /// Checkpoint directory to resume from; empty starts fresh.
  std::string resume_from;
  /// Stop after this epoch (0 runs every configured epoch).
  int stop_after_epoch = 0;
  bool write_checkpoints = true;
  /// Called after every step.
  std::function<void(const Trainer &, const LossReport &,
                     const StepDiagnostics &)>
      observer;
};

struct TrainResult {
  TrainState state;
  std::string metrics_path;
  std::string last_checkpoint;
  int64_t steps_run = 0;
};

/// The epoch loop. Writes out_dir/metrics.jsonl (one record per step) and
/// out_dir/checkpoints/epoch-NNN after every epoch. On resume the metrics
/// log is cut back to the checkpoint's step before appending. If
/// trainer_out is given the trained model is moved into it.
TrainResult Train(const ExperimentConfig &cfg, const TrainingData &data,
                  const TrainOptions &options,
                  std::unique_ptr<Trainer> *trainer_out = nullptr);

}  // namespace classaug

#endif  // CLASSAUG_TRAINER_H_

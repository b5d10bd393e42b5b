// classaug/config.h

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

#ifndef CLASSAUG_CONFIG_H_
#define CLASSAUG_CONFIG_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace classaug {

/// Which training objectives are active. Mirrors the ablation grid:
/// kBaseline is AM-Softmax only; kLsyn adds the synthetic-class loss; kAt
/// adds the adversarial game against a plain discriminator; kAtSd swaps in
/// the semantic discriminator; kFull combines the synthetic loss with the
/// semantic adversarial game.
enum class TrainMode { kBaseline, kLsyn, kAt, kAtSd, kFull };

std::string ModeName(TrainMode mode);
/// Accepts "baseline", "lsyn", "at", "at+sd", "full". Throws ParseError.
TrainMode ParseMode(const std::string &name);

bool ModeUsesSyntheticLoss(TrainMode mode);
bool ModeUsesAdversary(TrainMode mode);
bool ModeUsesSemanticDiscriminator(TrainMode mode);

/// Every hyperparameter of an experiment. The defaults are the full-scale
/// values; configs/desk.conf holds the desk-scale profile.
struct ExperimentConfig {
  // Front end.
  int sample_rate = 16000;
  int fbank_dims = 80;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 512;
  double mel_low_hz = 20.0;
  double mel_high_hz = 7600.0;
  double segment_s = 3.0;

  // Encoder and classification head.
  int embed_dim = 32;
  int encoder_channels = 64;
  double margin = 0.2;
  double scale = 30.0;

  // Class augmentation and the adversarial game.
  TrainMode mode = TrainMode::kFull;
  // Number of real training classes used for the 1/lambda scaling of the
  // synthetic loss; 0 means "count the classes in the training manifest".
  int lambda_speakers = 0;
  double syn_loss_weight = 1.0;
  // Score synthetic rows against [W | W_syn] (true) or W_syn alone (false).
  bool syn_against_real = true;
  // Keep the BCE(D(e), 0) term of the generator loss.
  bool generator_real_term = true;
  double lambda_adv_base = 0.1;
  std::pair<double, double> lambda_adv_bounds{0.01, 1.0};
  double ema_beta = 0.9;

  // Discriminator.
  int disc_hidden = 32;
  int disc_heads = 4;
  int pseudo_seq_len = 4;
  int head_hidden = 64;
  int head_blocks = 2;
  double dropout = 0.1;
  int backbone_depth = 12;
  std::vector<int> backbone_layers{7, 9, 11, 12};

  // Optimization.
  double lr_encoder = 1e-3;
  double lr_discriminator = 2e-4;
  double weight_decay = 1e-7;
  int warmup_steps = 2000;
  double grad_clip = 5.0;
  int batch_size = 50;
  int epochs = 30;

  // Evaluation.
  double mindcf_p_target = 0.01;
  double mindcf_c_miss = 1.0;
  double mindcf_c_fa = 1.0;

  // Procedural corpus.
  int gen_train_speakers = 50;
  int gen_heldout_speakers = 20;
  int gen_utts_per_speaker = 20;
  double gen_utterance_s = 4.0;
  int gen_trials = 200;

  uint64_t seed = 0;

  int WindowSamples() const;
  int HopSamples() const;
  int SegmentSamples() const;

  bool operator==(const ExperimentConfig &) const = default;
};

/// Returns cfg unchanged if every invariant holds; otherwise throws
/// ValidationError naming the first violated field.
const ExperimentConfig &ValidateConfig(const ExperimentConfig &cfg);

/// Writes one "key = value" line per field.
void SaveConfig(const ExperimentConfig &cfg, const std::string &path);
std::string ConfigToString(const ExperimentConfig &cfg);

/// Strict reader: unknown keys and malformed values are ParseErrors carrying
/// the line number. Keys absent from the file keep their defaults. The
/// result is validated.
ExperimentConfig LoadConfig(const std::string &path);
ExperimentConfig ParseConfig(const std::string &text,
                             const std::string &source = "<string>");

/// Names of every key understood by the config reader, in file order.
std::vector<std::string> ConfigKeys();

}  // namespace classaug

#endif  // CLASSAUG_CONFIG_H_

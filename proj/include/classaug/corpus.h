// classaug/corpus.h

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

#ifndef CLASSAUG_CORPUS_H_
#define CLASSAUG_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "classaug/config.h"
#include "classaug/types.h"

namespace classaug {

/// Parameters of one procedural speaker: a jittered pulse-train source with
/// breath noise, a spectral tilt, and a cascade of formant resonators.
struct SyntheticSpeakerSpec {
  int speaker_id = 0;
  double fundamental_hz = 120.0;
  std::vector<double> formant_hz;
  std::vector<double> bandwidth_hz;
  double jitter = 0.01;
  double breathiness = 0.1;
  double tilt = 0.8;

  /// fundamental_hz > 0 and strictly increasing formants.
  void Validate() const;
};

/// Speaker parameters depend only on (corpus_seed, speaker_id).
SyntheticSpeakerSpec SampleSpeaker(uint64_t corpus_seed, int speaker_id);

/// Samples in [-1, 1), quantized to 16-bit PCM. Depends only on the
/// arguments, so utterances can be produced in any order.
std::vector<double> SynthesizeUtterance(const SyntheticSpeakerSpec &speaker,
                                        uint64_t corpus_seed, int utt_index,
                                        double duration_s, int sample_rate);

/// "synth:<seed>:<speaker>:<utt>:<duration_s>"
std::string SynthSource(uint64_t corpus_seed, int speaker_id, int utt_index,
                        double duration_s);

/// Resolves a manifest source: a 16-bit PCM WAV path or a synth: spec.
/// Throws IoError/ParseError, or DimensionError on a sample-rate mismatch.
std::vector<double> LoadWaveform(const std::string &source, int sample_rate);

std::string SpeakerName(int speaker_id);
std::string UtteranceName(int speaker_id, int utt_index);

struct CorpusLayout {
  Manifest train;
  Manifest heldout;
  TrialList trials;
};

/// Manifests with synth: sources for gen_train_speakers training speakers and
/// gen_heldout_speakers disjoint held-out speakers, plus gen_trials held-out
/// trials (half targets). Everything is a function of `seed`.
CorpusLayout BuildCorpusLayout(const ExperimentConfig &cfg, uint64_t seed);

/// Balanced random trials over a manifest; distinct pairs, no self trials.
TrialList MakeTrials(const Manifest &manifest, int num_trials, uint64_t seed);

struct GeneratedCorpus {
  std::string train_manifest;
  std::string heldout_manifest;
  std::string trials;
  int num_speakers = 0;
  int num_utterances = 0;
  std::string hash;  // SHA-256 over manifests, trials and every WAV file
};

/// Writes wav/<speaker>/<utt>.wav, train.manifest, heldout.manifest and
/// trials.txt under out_dir. Throws IoError if out_dir is not writable.
GeneratedCorpus GenerateCorpus(const ExperimentConfig &cfg,
                               const std::string &out_dir);

}  // namespace classaug

#endif  // CLASSAUG_CORPUS_H_

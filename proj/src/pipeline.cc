// pipeline.cc

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

#include "classaug/pipeline.h"

#include <set>

#include "classaug/checkpoint.h"
#include "classaug/corpus.h"
#include "classaug/errors.h"
#include "classaug/fbank.h"

namespace classaug {

std::map<std::string, Vector> EmbedTrialUtterances(Encoder &encoder,
                                                   const ExperimentConfig &cfg,
                                                   const Manifest &manifest,
                                                   const TrialList &trials) {
  std::map<std::string, const ManifestEntry *> by_id;
  for (const ManifestEntry &m : manifest) by_id.emplace(m.utterance_id, &m);
  std::set<std::string> needed, missing;
  for (const Trial &t : trials.trials)
    for (const std::string *id : {&t.enroll_id, &t.test_id}) {
      needed.insert(*id);
      if (!by_id.count(*id)) missing.insert(*id);
    }
  if (!missing.empty()) {
    std::string list;
    for (const std::string &id : missing) list += (list.empty() ? "" : ", ") + id;
    throw MissingUtteranceError(list);
  }
  FbankExtractor extractor(cfg);
  std::map<std::string, Vector> out;
  for (const std::string &id : needed) {
    std::vector<double> wav = LoadWaveform(by_id.at(id)->source, cfg.sample_rate);
    out.emplace(id, encoder.Encode(extractor.Compute(wav)));
  }
  return out;
}

EvaluationOutput EvaluateEncoder(Encoder &encoder, const ExperimentConfig &cfg,
                                 const Manifest &manifest,
                                 const TrialList &trials,
                                 const std::string &score_path) {
  trials.Validate();
  EvaluationOutput out;
  out.scored =
      ScoreTrials(trials, EmbedTrialUtterances(encoder, cfg, manifest, trials));
  out.summary = Summarize(out.scored, cfg.mindcf_p_target, cfg.mindcf_c_miss,
                          cfg.mindcf_c_fa);
  if (!score_path.empty()) WriteScoreFile(score_path, trials, out.scored);
  return out;
}

EvaluationOutput EvaluateCheckpoint(const std::string &checkpoint_dir,
                                    const Manifest &manifest,
                                    const TrialList &trials,
                                    const std::string &score_path) {
  std::unique_ptr<Trainer> trainer = RestoreTrainer(checkpoint_dir);
  return EvaluateEncoder(trainer->encoder(), trainer->config(), manifest,
                         trials, score_path);
}

}  // namespace classaug

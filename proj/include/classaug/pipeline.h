// classaug/pipeline.h

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

#ifndef CLASSAUG_PIPELINE_H_
#define CLASSAUG_PIPELINE_H_

#include <map>
#include <string>

#include "classaug/config.h"
#include "classaug/encoder.h"
#include "classaug/eval.h"
#include "classaug/types.h"

namespace classaug {

/// Embeds every utterance of the manifest that appears in the trial list,
/// using full-length features. Throws MissingUtteranceError listing every
/// trial id absent from the manifest.
std::map<std::string, Vector> EmbedTrialUtterances(Encoder &encoder,
                                                   const ExperimentConfig &cfg,
                                                   const Manifest &manifest,
                                                   const TrialList &trials);

struct EvaluationOutput {
  ScoredTrials scored;
  EvalSummary summary;
};

/// Embeds, scores and summarizes; writes the score file if score_path is
/// nonempty.
EvaluationOutput EvaluateEncoder(Encoder &encoder, const ExperimentConfig &cfg,
                                 const Manifest &manifest,
                                 const TrialList &trials,
                                 const std::string &score_path = "");

/// Same, loading the encoder from a checkpoint directory.
EvaluationOutput EvaluateCheckpoint(const std::string &checkpoint_dir,
                                    const Manifest &manifest,
                                    const TrialList &trials,
                                    const std::string &score_path = "");

}  // namespace classaug

#endif  // CLASSAUG_PIPELINE_H_

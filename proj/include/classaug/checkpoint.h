// classaug/checkpoint.h

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

#ifndef CLASSAUG_CHECKPOINT_H_
#define CLASSAUG_CHECKPOINT_H_

#include <memory>
#include <string>

#include "classaug/config.h"
#include "classaug/trainer.h"

namespace classaug {

inline constexpr const char *kCheckpointVersion = "classaug-checkpoint 1";

/// Writes dir/{VERSION, config.conf, params.bin, optimizer.bin, state.json}.
/// The files go to a sibling temporary directory that is renamed into
/// place, so an interrupted write never leaves a partial checkpoint.
void SaveCheckpoint(Trainer &trainer, const std::string &dir);

/// Restores weights, optimizer moments and state into a trainer built
/// from a compatible config. Throws VersionError on a format, shape or
/// config mismatch and IoError on unreadable files.
void LoadCheckpoint(const std::string &dir, Trainer *trainer);

/// The config stored in a checkpoint.
ExperimentConfig CheckpointConfig(const std::string &dir);

/// Builds a trainer from the checkpoint's own config and restores it.
std::unique_ptr<Trainer> RestoreTrainer(const std::string &dir);

}  // namespace classaug

#endif  // CLASSAUG_CHECKPOINT_H_

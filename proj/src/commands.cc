// commands.cc

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

#include "classaug/commands.h"

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "classaug/config.h"
#include "classaug/corpus.h"
#include "classaug/errors.h"
#include "classaug/io.h"
#include "classaug/logging.h"
#include "classaug/mixup.h"
#include "classaug/pipeline.h"
#include "classaug/selftest.h"
#include "classaug/trainer.h"

namespace classaug {

namespace fs = std::filesystem;

namespace {

CommandResult Failure(const std::string &command, const std::exception &e) {
  std::cerr << "classaug " << command << ": " << e.what() << std::endl;
  return {kExitFailure, ""};
}

}  // namespace

CommandResult CmdGenerate(const GenerateArgs &args) {
  try {
    ExperimentConfig cfg = LoadConfig(args.config);
    GeneratedCorpus corpus = GenerateCorpus(cfg, args.out_dir);
    nlohmann::ordered_json j;
    j["num_speakers"] = corpus.num_speakers;
    j["num_utterances"] = corpus.num_utterances;
    j["corpus_hash"] = corpus.hash;
    j["train_manifest"] = corpus.train_manifest;
    j["heldout_manifest"] = corpus.heldout_manifest;
    j["trials"] = corpus.trials;
    return {kExitOk, j.dump()};
  } catch (const std::exception &e) {
    return Failure("generate", e);
  }
}

CommandResult CmdTrain(const TrainArgs &args) {
  try {
    ExperimentConfig cfg = LoadConfig(args.config);
    if (!args.mode.empty()) cfg.mode = ParseMode(args.mode);
    const TrainingData data = LoadTrainingData(cfg, ReadManifest(args.manifest));
    TrainOptions options;
    options.out_dir = args.out_dir;
    options.resume_from = args.resume_from;
    options.stop_after_epoch = args.stop_after_epoch;
    LossReport last;
    options.observer = [&last](const Trainer &, const LossReport &r,
                               const StepDiagnostics &) { last = r; };
    TrainResult result = Train(cfg, data, options);
    nlohmann::ordered_json j;
    j["mode"] = ModeName(cfg.mode);
    j["num_classes"] = data.NumClasses();
    j["num_utterances"] = data.Size();
    j["steps"] = result.state.step;
    j["epochs"] = result.state.epoch;
    j["final_l_total"] = last.l_total;
    j["metrics"] = result.metrics_path;
    j["checkpoint"] = result.last_checkpoint;
    return {kExitOk, j.dump()};
  } catch (const std::exception &e) {
    return Failure("train", e);
  }
}

CommandResult CmdEvaluate(const EvaluateArgs &args) {
  try {
    const Manifest manifest = ReadManifest(args.manifest);
    const TrialList trials = ReadTrialList(args.trials);
    EvaluationOutput out =
        EvaluateCheckpoint(args.checkpoint, manifest, trials, args.scores);
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(out.summary.ToJson());
    j["scores"] = args.scores;
    j["scores_sha256"] = Sha256OfFile(args.scores);
    return {kExitOk, j.dump()};
  } catch (const MissingUtteranceError &e) {
    std::cerr << "classaug evaluate: trial ids missing from the manifest: "
              << e.id() << std::endl;
    return {kExitFailure, ""};
  } catch (const std::exception &e) {
    return Failure("evaluate", e);
  }
}

CommandResult CmdSelfTest(double inject_mixup_coefficient) {
  if (inject_mixup_coefficient > 0.0)
    SetMixCoefficientForTesting(inject_mixup_coefficient);
  std::vector<PropertyResult> results = RunSelfTest();
  ResetMixCoefficientForTesting();
  int failed = 0;
  for (const PropertyResult &r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) {
      std::cout << "  (" << r.detail << ")";
      ++failed;
    }
    std::cout << '\n';
  }
  nlohmann::ordered_json j;
  j["properties"] = results.size();
  j["failed"] = failed;
  return {failed ? kExitFailure : kExitOk, j.dump()};
}

int RunCli(int argc, char **argv) {
  CLI::App app{"Class-augmented embedding training with synthetic-label mixup "
               "and an adversarial discriminator"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App *generate = app.add_subcommand("generate", "write a procedural corpus");
  generate->add_option("--config", gen.config, "experiment config")->required();
  generate->add_option("--out", gen.out_dir, "output directory")->required();

  TrainArgs train;
  CLI::App *train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--config", train.config, "experiment config")->required();
  train_cmd->add_option("--manifest", train.manifest, "training manifest")->required();
  train_cmd->add_option("--out", train.out_dir, "output directory")->required();
  train_cmd->add_option("--mode", train.mode, "objectives to train with")
      ->check(CLI::IsMember({"baseline", "lsyn", "at", "at+sd", "full"}));
  train_cmd->add_option("--resume", train.resume_from, "checkpoint directory");
  train_cmd->add_option("--stop-after-epoch", train.stop_after_epoch,
                        "stop after this epoch")
      ->check(CLI::NonNegativeNumber);

  EvaluateArgs eval;
  CLI::App *evaluate = app.add_subcommand("evaluate", "score a trial list");
  evaluate->add_option("--checkpoint", eval.checkpoint, "checkpoint directory")
      ->required();
  evaluate->add_option("--manifest", eval.manifest, "manifest of trial utterances")
      ->required();
  evaluate->add_option("--trials", eval.trials, "trial list")->required();
  evaluate->add_option("--scores", eval.scores, "score file to write");

  double inject = 0.0;
  CLI::App *selftest = app.add_subcommand("selftest", "run the property suite");
  selftest->add_option("--inject-mixup-coefficient", inject)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  CommandResult result;
  if (*generate) result = CmdGenerate(gen);
  else if (*train_cmd) result = CmdTrain(train);
  else if (*evaluate) result = CmdEvaluate(eval);
  else result = CmdSelfTest(inject);
  if (!result.summary.empty()) std::cout << result.summary << std::endl;
  return result.exit_code;
}

}  // namespace classaug

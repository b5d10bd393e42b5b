// classaug/commands.h

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

#ifndef CLASSAUG_COMMANDS_H_
#define CLASSAUG_COMMANDS_H_

#include <string>

namespace classaug {

/// Exit codes of every command.
enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct CommandResult {
  int exit_code = kExitOk;
  /// JSON summary printed to stdout on success.
  std::string summary;
};

struct GenerateArgs {
  std::string config;
  std::string out_dir;
};

struct TrainArgs {
  std::string config;
  std::string manifest;
  std::string out_dir;
  /// Overrides the config's mode when nonempty.
  std::string mode;
  std::string resume_from;
  int stop_after_epoch = 0;
};

struct EvaluateArgs {
  std::string checkpoint;
  std::string manifest;
  std::string trials;
  std::string scores = "scores.txt";
};

/// Each command reports failures on stderr and in exit_code rather than
/// throwing.
CommandResult CmdGenerate(const GenerateArgs &args);
CommandResult CmdTrain(const TrainArgs &args);
CommandResult CmdEvaluate(const EvaluateArgs &args);
/// inject_mixup_coefficient > 0 replaces the mixing coefficient for the
/// duration of the run (fault injection).
CommandResult CmdSelfTest(double inject_mixup_coefficient = 0.0);

/// Parses argv, runs the chosen subcommand, prints its summary and returns
/// the exit code.
int RunCli(int argc, char **argv);

}  // namespace classaug

#endif  // CLASSAUG_COMMANDS_H_

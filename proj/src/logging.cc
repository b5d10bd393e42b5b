// logging.cc

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

#include "classaug/logging.h"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace classaug {

namespace {

std::optional<LogLevel> g_level;

LogLevel LevelFromEnvironment() {
  const char *env = std::getenv("CLASSAUG_LOG_LEVEL");
  if (!env) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "error" || v == "0") return LogLevel::kError;
  if (v == "warning" || v == "1") return LogLevel::kWarning;
  if (v == "debug" || v == "3") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

const char *LevelName(LogLevel level) {
  switch (level) {
    case LogLevel::kError: return "ERROR";
    case LogLevel::kWarning: return "WARNING";
    case LogLevel::kInfo: return "INFO";
    case LogLevel::kDebug: return "DEBUG";
  }
  return "";
}

}  // namespace

LogLevel CurrentLogLevel() {
  if (!g_level) g_level = LevelFromEnvironment();
  return *g_level;
}

void SetLogLevel(LogLevel level) { g_level = level; }

LogMessage::~LogMessage() {
  std::cerr << "classaug " << LevelName(level_) << ": " << stream_.str()
            << std::endl;
}

}  // namespace classaug

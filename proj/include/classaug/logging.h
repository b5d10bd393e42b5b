// classaug/logging.h

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

#ifndef CLASSAUG_LOGGING_H_
#define CLASSAUG_LOGGING_H_

#include <sstream>

namespace classaug {

enum class LogLevel { kError = 0, kWarning = 1, kInfo = 2, kDebug = 3 };

/// Read once from CLASSAUG_LOG_LEVEL (error, warning, info, debug or
/// 0-3); info when unset.
LogLevel CurrentLogLevel();
void SetLogLevel(LogLevel level);

/// Writes one line to stderr on destruction.
class LogMessage {
 public:
  explicit LogMessage(LogLevel level) : level_(level) {}
  ~LogMessage();
  std::ostream &stream() { return stream_; }

 private:
  LogLevel level_;
  std::ostringstream stream_;
};

}  // namespace classaug

#define CLASSAUG_LOG_AT(level)                        \
  if (::classaug::CurrentLogLevel() < (level)) {      \
  } else                                              \
    ::classaug::LogMessage(level).stream()

#define CLASSAUG_LOG CLASSAUG_LOG_AT(::classaug::LogLevel::kInfo)
#define CLASSAUG_WARN CLASSAUG_LOG_AT(::classaug::LogLevel::kWarning)
#define CLASSAUG_DEBUG CLASSAUG_LOG_AT(::classaug::LogLevel::kDebug)

#endif  // CLASSAUG_LOGGING_H_

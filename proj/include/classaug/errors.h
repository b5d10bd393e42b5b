// classaug/errors.h

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

#ifndef CLASSAUG_ERRORS_H_
#define CLASSAUG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace classaug {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A record failed an invariant check. field() names the first offending
/// field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string &what)
      : Error("invalid " + field + ": " + what), field_(std::move(field)) {}
  const std::string &field() const { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class TooShortError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A vector or matrix column was too close to zero to normalize.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class SingleClassError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class MissingLayerError : public Error {
 public:
  explicit MissingLayerError(int layer)
      : Error("hidden layer " + std::to_string(layer) + " is not available"),
        layer_(layer) {}
  int layer() const { return layer_; }

 private:
  int layer_;
};

/// Checkpoint format or shape mismatch.
class VersionError : public Error {
 public:
  using Error::Error;
};

class MissingUtteranceError : public Error {
 public:
  explicit MissingUtteranceError(const std::string &id)
      : Error("utterance not found: " + id), id_(id) {}
  const std::string &id() const { return id_; }

 private:
  std::string id_;
};

/// Trials without at least one target and one nontarget.
class DegenerateTrialsError : public Error {
 public:
  using Error::Error;
};

}  // namespace classaug

#endif  // CLASSAUG_ERRORS_H_

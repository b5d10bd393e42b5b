// classaug/rng.h

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

#ifndef CLASSAUG_RNG_H_
#define CLASSAUG_RNG_H_

#include <cstdint>
#include <random>
#include <string>

namespace classaug {

/// Seeded random stream whose full state can be saved and restored.
/// Normal() does not cache a second Box-Muller draw, so the engine state is
/// the whole state.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Normal();
  /// Uniform integer in [lo, hi].
  int64_t UniformInt(int64_t lo, int64_t hi);

  std::string Serialize() const;
  void Deserialize(const std::string &text);

  bool operator==(const Rng &other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent seed from a base seed and a stream index
/// (splitmix64 finalizer).
uint64_t MixSeed(uint64_t seed, uint64_t stream);

}  // namespace classaug

#endif  // CLASSAUG_RNG_H_

// classaug/io.h

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

#ifndef CLASSAUG_IO_H_
#define CLASSAUG_IO_H_

#include <string>
#include <vector>

#include "classaug/types.h"

namespace classaug {

/// Trial list: one "label enroll_id test_id" per line, label 1 = target.
TrialList ReadTrialList(const std::string &path);
void WriteTrialList(const TrialList &trials, const std::string &path);

/// Manifest: one "utterance_id speaker source" per line. Relative file
/// sources are resolved against the manifest's directory on read; generator
/// sources ("synth:...") are kept verbatim.
Manifest ReadManifest(const std::string &path);
void WriteManifest(const Manifest &manifest, const std::string &path);

/// 16-bit PCM mono RIFF/WAVE. Samples are scaled to [-1, 1).
std::vector<double> ReadWav(const std::string &path, int *sample_rate);
void WriteWav(const std::vector<double> &samples, int sample_rate,
              const std::string &path);
/// Quantizes to 16-bit exactly as WriteWav does.
std::vector<double> QuantizePcm16(const std::vector<double> &samples);

std::string Sha256Hex(const std::string &bytes);
std::string Sha256OfFile(const std::string &path);
std::string ReadFileBytes(const std::string &path);

}  // namespace classaug

#endif  // CLASSAUG_IO_H_

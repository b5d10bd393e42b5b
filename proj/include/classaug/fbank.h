// classaug/fbank.h

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

#ifndef CLASSAUG_FBANK_H_
#define CLASSAUG_FBANK_H_

#include <memory>
#include <span>
#include <vector>

#include "classaug/config.h"
#include "classaug/rng.h"
#include "classaug/types.h"

namespace classaug {

/// Log-mel filterbank energies, one row per frame.
struct FbankMatrix {
  Matrix frames;  // [T x num_bins]
  double frame_rate = 100.0;

  int NumFrames() const { return static_cast<int>(frames.rows()); }
  int Dim() const { return static_cast<int>(frames.cols()); }
};

/// 1 + floor((num_samples - window) / hop), or 0 if shorter than a window.
int NumFrames(int num_samples, int window, int hop);

/// Triangular filters on the HTK mel scale, evaluated at the fft_size/2+1
/// power-spectrum bins. Returns [fft_size/2+1 x num_bins].
Matrix MelFilterbank(int fft_size, int sample_rate, int num_bins,
                     double low_hz, double high_hz);

/// Hamming window of the given length.
std::vector<double> HammingWindow(int length);

/// Power spectrum, mel integration, log with a 1e-10 floor. No dithering,
/// pre-emphasis, augmentation or voice activity detection.
class FbankExtractor {
 public:
  explicit FbankExtractor(const ExperimentConfig &cfg);
  ~FbankExtractor();
  FbankExtractor(const FbankExtractor &) = delete;
  FbankExtractor &operator=(const FbankExtractor &) = delete;

  /// Throws TooShortError if the waveform is shorter than one window.
  FbankMatrix Compute(std::span<const double> waveform) const;

  int Dim() const { return num_bins_; }

  static constexpr double kLogFloor = 1e-10;

 private:
  struct FftPlan;

  int window_;
  int hop_;
  int fft_size_;
  int num_bins_;
  double frame_rate_;
  std::vector<double> hamming_;
  // Per mel band: first spectrum bin and its nonzero weights.
  std::vector<int> band_start_;
  std::vector<std::vector<double>> band_weights_;
  std::unique_ptr<FftPlan> plan_;
};

FbankMatrix ExtractFbank(std::span<const double> waveform,
                         const ExperimentConfig &cfg);

/// Draws a segment_s-long chunk. Longer inputs get a uniform offset in
/// [0, len - L]; shorter inputs are wrap-padded starting at offset 0.
std::vector<double> RandomSegment(std::span<const double> waveform,
                                  const ExperimentConfig &cfg, Rng &rng);

/// Number of frames covered by a segment_s-long chunk.
int SegmentFrames(const ExperimentConfig &cfg);

/// Frame-domain counterpart of RandomSegment: a uniform offset in
/// [0, T - frames] for long inputs, cyclic repetition from frame 0 for
/// short ones.
FbankMatrix RandomFrameCrop(const FbankMatrix &fbank, int frames, Rng &rng);

}  // namespace classaug

#endif  // CLASSAUG_FBANK_H_

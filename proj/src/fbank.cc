// fbank.cc

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

#include "classaug/fbank.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "classaug/errors.h"

namespace classaug {

struct FbankExtractor::FftPlan {
  explicit FftPlan(int n) : size(n) {
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  int size;
  double *in;
  fftw_complex *out;
  fftw_plan plan;
};

int NumFrames(int num_samples, int window, int hop) {
  if (num_samples < window) return 0;
  return 1 + (num_samples - window) / hop;
}

namespace {

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

}  // namespace

Matrix MelFilterbank(int fft_size, int sample_rate, int num_bins,
                     double low_hz, double high_hz) {
  const int num_fft_bins = fft_size / 2 + 1;
  const double mel_low = HzToMel(low_hz), mel_high = HzToMel(high_hz);
  const double mel_delta = (mel_high - mel_low) / (num_bins + 1);
  Matrix banks = Matrix::Zero(num_fft_bins, num_bins);
  for (int b = 0; b < num_bins; ++b) {
    double left = mel_low + b * mel_delta;
    double center = left + mel_delta;
    double right = center + mel_delta;
    for (int k = 0; k < num_fft_bins; ++k) {
      double mel = HzToMel(static_cast<double>(k) * sample_rate / fft_size);
      if (mel > left && mel < right) {
        banks(k, b) = mel <= center ? (mel - left) / (center - left)
                                    : (right - mel) / (right - center);
      }
    }
  }
  return banks;
}

std::vector<double> HammingWindow(int length) {
  std::vector<double> w(length);
  if (length == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int i = 0; i < length; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (length - 1));
  return w;
}

FbankExtractor::FbankExtractor(const ExperimentConfig &cfg)
    : window_(cfg.WindowSamples()),
      hop_(cfg.HopSamples()),
      fft_size_(cfg.fft_size),
      num_bins_(cfg.fbank_dims),
      frame_rate_(static_cast<double>(cfg.sample_rate) / cfg.HopSamples()),
      hamming_(HammingWindow(cfg.WindowSamples())),
      plan_(std::make_unique<FftPlan>(cfg.fft_size)) {
  Matrix banks = MelFilterbank(fft_size_, cfg.sample_rate, num_bins_,
                               cfg.mel_low_hz, cfg.mel_high_hz);
  band_start_.assign(num_bins_, 0);
  band_weights_.assign(num_bins_, {});
  for (int b = 0; b < num_bins_; ++b) {
    int first = -1, last = -1;
    for (int k = 0; k < banks.rows(); ++k) {
      if (banks(k, b) != 0.0) {
        if (first < 0) first = k;
        last = k;
      }
    }
    if (first < 0) continue;  // band narrower than one bin
    band_start_[b] = first;
    for (int k = first; k <= last; ++k)
      band_weights_[b].push_back(banks(k, b));
  }
}

FbankExtractor::~FbankExtractor() = default;

FbankMatrix FbankExtractor::Compute(std::span<const double> waveform) const {
  const int num_samples = static_cast<int>(waveform.size());
  const int num_frames = NumFrames(num_samples, window_, hop_);
  if (num_frames < 1)
    throw TooShortError("waveform has " + std::to_string(num_samples) +
                        " samples, fewer than one " +
                        std::to_string(window_) + "-sample window");
  FbankMatrix out;
  out.frame_rate = frame_rate_;
  out.frames.resize(num_frames, num_bins_);
  std::vector<double> power(fft_size_ / 2 + 1);
  double *in = plan_->in;
  fftw_complex *spec = plan_->out;
  for (int t = 0; t < num_frames; ++t) {
    const double *frame = waveform.data() + static_cast<size_t>(t) * hop_;
    for (int i = 0; i < window_; ++i) in[i] = frame[i] * hamming_[i];
    std::fill(in + window_, in + fft_size_, 0.0);
    fftw_execute_dft_r2c(plan_->plan, in, spec);
    for (size_t k = 0; k < power.size(); ++k)
      power[k] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    for (int b = 0; b < num_bins_; ++b) {
      double energy = 0.0;
      const auto &w = band_weights_[b];
      for (size_t j = 0; j < w.size(); ++j)
        energy += w[j] * power[band_start_[b] + j];
      out.frames(t, b) = std::log(std::max(energy, kLogFloor));
    }
  }
  return out;
}

FbankMatrix ExtractFbank(std::span<const double> waveform,
                         const ExperimentConfig &cfg) {
  FbankExtractor extractor(cfg);
  return extractor.Compute(waveform);
}

std::vector<double> RandomSegment(std::span<const double> waveform,
                                  const ExperimentConfig &cfg, Rng &rng) {
  if (waveform.empty()) throw TooShortError("empty waveform");
  const size_t length = static_cast<size_t>(cfg.SegmentSamples());
  std::vector<double> out(length);
  if (waveform.size() >= length) {
    size_t offset = static_cast<size_t>(
        rng.UniformInt(0, static_cast<int64_t>(waveform.size() - length)));
    std::copy_n(waveform.begin() + offset, length, out.begin());
  } else {
    for (size_t i = 0; i < length; ++i) out[i] = waveform[i % waveform.size()];
  }
  return out;
}

int SegmentFrames(const ExperimentConfig &cfg) {
  return NumFrames(cfg.SegmentSamples(), cfg.WindowSamples(), cfg.HopSamples());
}

FbankMatrix RandomFrameCrop(const FbankMatrix &fbank, int frames, Rng &rng) {
  if (fbank.NumFrames() == 0) throw TooShortError("no frames to crop");
  FbankMatrix out;
  out.frame_rate = fbank.frame_rate;
  const int total = fbank.NumFrames();
  if (total >= frames) {
    const int offset = static_cast<int>(rng.UniformInt(0, total - frames));
    out.frames = fbank.frames.middleRows(offset, frames);
  } else {
    out.frames.resize(frames, fbank.Dim());
    for (int t = 0; t < frames; ++t) out.frames.row(t) = fbank.frames.row(t % total);
  }
  return out;
}

}  // namespace classaug

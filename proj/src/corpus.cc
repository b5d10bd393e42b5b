// corpus.cc

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

#include "classaug/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

#include "classaug/errors.h"
#include "classaug/io.h"
#include "classaug/rng.h"

namespace classaug {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kSpeakerStream = 1;
constexpr uint64_t kUtteranceStream = 2;
constexpr uint64_t kTrialStream = 3;

double LogUniform(Rng &rng, double lo, double hi) {
  return lo * std::exp(rng.Uniform() * std::log(hi / lo));
}

double UniformIn(Rng &rng, double lo, double hi) {
  return lo + (hi - lo) * rng.Uniform();
}

// Two-pole resonator with unit gain near its centre frequency.
struct Resonator {
  double a1 = 0, a2 = 0, gain = 1;
  double y1 = 0, y2 = 0;

  void Tune(double freq, double bandwidth, int sample_rate) {
    double r = std::exp(-std::numbers::pi * bandwidth / sample_rate);
    double theta = 2.0 * std::numbers::pi * freq / sample_rate;
    a1 = 2.0 * r * std::cos(theta);
    a2 = -r * r;
    gain = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
  }
  double Step(double x) {
    double y = gain * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

void SyntheticSpeakerSpec::Validate() const {
  if (!(fundamental_hz > 0))
    throw ValidationError("fundamental_hz", "must be positive");
  for (size_t i = 1; i < formant_hz.size(); ++i)
    if (!(formant_hz[i] > formant_hz[i - 1]))
      throw ValidationError("formant_hz", "must be strictly increasing");
  if (bandwidth_hz.size() != formant_hz.size())
    throw ValidationError("bandwidth_hz", "one bandwidth per formant");
}

SyntheticSpeakerSpec SampleSpeaker(uint64_t corpus_seed, int speaker_id) {
  Rng rng(MixSeed(MixSeed(corpus_seed, kSpeakerStream), speaker_id));
  SyntheticSpeakerSpec s;
  s.speaker_id = speaker_id;
  s.fundamental_hz = LogUniform(rng, 85.0, 260.0);
  static const double kLo[] = {300, 900, 2400, 3300};
  static const double kHi[] = {850, 2300, 3200, 4300};
  for (int k = 0; k < 4; ++k) {
    s.formant_hz.push_back(UniformIn(rng, kLo[k], kHi[k]));
    s.bandwidth_hz.push_back(UniformIn(rng, 60.0, 160.0) * (1.0 + 0.3 * k));
  }
  s.jitter = UniformIn(rng, 0.005, 0.03);
  s.breathiness = UniformIn(rng, 0.02, 0.3);
  s.tilt = UniformIn(rng, 0.5, 0.95);
  return s;
}

std::vector<double> SynthesizeUtterance(const SyntheticSpeakerSpec &spk,
                                        uint64_t corpus_seed, int utt_index,
                                        double duration_s, int sample_rate) {
  spk.Validate();
  Rng rng(MixSeed(MixSeed(MixSeed(corpus_seed, kUtteranceStream),
                          spk.speaker_id),
                  utt_index));
  const int n = std::max(1, static_cast<int>(std::lround(duration_s * sample_rate)));
  const double pi = std::numbers::pi;

  // Utterance-level prosody.
  const double f0_utt = spk.fundamental_hz * std::exp(0.08 * rng.Normal());
  const double contour_rate = UniformIn(rng, 0.5, 2.0);
  const double contour_phase = UniformIn(rng, 0.0, 2 * pi);
  const double syllable_rate = UniformIn(rng, 3.0, 5.0);
  const double syllable_phase = UniformIn(rng, 0.0, 2 * pi);

  // Phone-like formant targets every 200 ms, shared jitter around the
  // speaker's own formants.
  const int nf = static_cast<int>(spk.formant_hz.size());
  const int target_len = sample_rate / 5;
  const int num_targets = n / target_len + 2;
  std::vector<std::vector<double>> targets(num_targets, std::vector<double>(nf));
  for (auto &t : targets) {
    double shift = 0.12 * rng.Normal();
    for (int k = 0; k < nf; ++k)
      t[k] = spk.formant_hz[k] * std::exp(shift + 0.05 * rng.Normal());
  }

  std::vector<Resonator> res(nf);
  const int block = 80;
  double phase = 0.0;
  double period_scale = 1.0;
  double tilt_state = 0.0;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    if (i % block == 0) {
      double pos = static_cast<double>(i) / target_len;
      int a = static_cast<int>(pos);
      double frac = pos - a;
      frac = frac * frac * (3 - 2 * frac);
      std::vector<double> freqs(nf);
      for (int k = 0; k < nf; ++k)
        freqs[k] = (1 - frac) * targets[a][k] + frac * targets[a + 1][k];
      // Keep resonators ordered and below Nyquist.
      for (int k = 0; k < nf; ++k) {
        double f = std::min(freqs[k], 0.45 * sample_rate);
        if (k > 0) f = std::max(f, freqs[k - 1] + 50.0);
        res[k].Tune(f, spk.bandwidth_hz[k], sample_rate);
      }
    }
    double t = static_cast<double>(i) / sample_rate;
    double f0 = f0_utt * (1.0 + 0.05 * std::sin(2 * pi * contour_rate * t +
                                                contour_phase));
    phase += f0 * period_scale / sample_rate;
    double excitation = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      excitation = 1.0;
      period_scale = 1.0 + spk.jitter * rng.Normal();
    }
    excitation += spk.breathiness * 0.3 * rng.Normal();
    tilt_state = (1.0 - spk.tilt) * excitation + spk.tilt * tilt_state;
    double y = tilt_state;
    for (auto &r : res) y = r.Step(y);
    double envelope =
        0.35 + 0.65 * std::abs(std::sin(pi * syllable_rate * t + syllable_phase));
    out[i] = y * envelope;
  }
  double peak = 0.0;
  for (double x : out) peak = std::max(peak, std::abs(x));
  double gain = UniformIn(rng, 0.3, 0.6) / std::max(peak, 1e-12);
  for (auto &x : out) x = x * gain + 1e-3 * rng.Normal();
  return QuantizePcm16(out);
}

std::string SynthSource(uint64_t corpus_seed, int speaker_id, int utt_index,
                        double duration_s) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "synth:%llu:%d:%d:%.17g",
                static_cast<unsigned long long>(corpus_seed), speaker_id,
                utt_index, duration_s);
  return buf;
}

std::vector<double> LoadWaveform(const std::string &source, int sample_rate) {
  if (source.rfind("synth:", 0) == 0) {
    unsigned long long seed = 0;
    int spk = 0, utt = 0;
    double dur = 0;
    char tail = 0;
    if (std::sscanf(source.c_str(), "synth:%llu:%d:%d:%lf%c", &seed, &spk,
                    &utt, &dur, &tail) != 4 ||
        dur <= 0)
      throw ParseError("malformed generator source '" + source + "'");
    return SynthesizeUtterance(SampleSpeaker(seed, spk), seed, utt, dur,
                               sample_rate);
  }
  int rate = 0;
  auto samples = ReadWav(source, &rate);
  if (rate != sample_rate)
    throw DimensionError(source + ": sample rate " + std::to_string(rate) +
                         " != " + std::to_string(sample_rate));
  return samples;
}

std::string SpeakerName(int speaker_id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%04d", speaker_id);
  return buf;
}

std::string UtteranceName(int speaker_id, int utt_index) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "spk%04d-utt%03d", speaker_id, utt_index);
  return buf;
}

TrialList MakeTrials(const Manifest &manifest, int num_trials, uint64_t seed) {
  TrialList list;
  if (num_trials <= 0) return list;
  std::vector<std::string> speakers;
  std::vector<std::vector<int>> by_speaker;
  for (int i = 0; i < static_cast<int>(manifest.size()); ++i) {
    auto it = std::find(speakers.begin(), speakers.end(), manifest[i].speaker);
    if (it == speakers.end()) {
      speakers.push_back(manifest[i].speaker);
      by_speaker.push_back({i});
    } else {
      by_speaker[it - speakers.begin()].push_back(i);
    }
  }
  std::vector<int> multi;
  for (int s = 0; s < static_cast<int>(speakers.size()); ++s)
    if (by_speaker[s].size() >= 2) multi.push_back(s);
  if (multi.empty() || speakers.size() < 2)
    throw ValidationError("trials",
                          "need two speakers and a speaker with two "
                          "utterances");
  Rng rng(MixSeed(seed, kTrialStream));
  std::set<std::pair<int, int>> used;
  const int num_target = (num_trials + 1) / 2;
  const int max_attempts = 1000 * num_trials;
  int attempts = 0;
  auto add = [&](int a, int b, bool target) {
    auto key = std::minmax(a, b);
    if (!used.insert(key).second) return false;
    list.trials.push_back(
        {target, manifest[a].utterance_id, manifest[b].utterance_id});
    return true;
  };
  int targets = 0;
  while (targets < num_target && attempts++ < max_attempts) {
    const auto &utts = by_speaker[multi[rng.UniformInt(0, multi.size() - 1)]];
    int a = utts[rng.UniformInt(0, utts.size() - 1)];
    int b = utts[rng.UniformInt(0, utts.size() - 1)];
    if (a != b && add(a, b, true)) ++targets;
  }
  int nontargets = 0;
  while (nontargets < num_trials - num_target && attempts++ < max_attempts) {
    int sa = static_cast<int>(rng.UniformInt(0, speakers.size() - 1));
    int sb = static_cast<int>(rng.UniformInt(0, speakers.size() - 1));
    if (sa == sb) continue;
    int a = by_speaker[sa][rng.UniformInt(0, by_speaker[sa].size() - 1)];
    int b = by_speaker[sb][rng.UniformInt(0, by_speaker[sb].size() - 1)];
    if (add(a, b, false)) ++nontargets;
  }
  return list;
}

CorpusLayout BuildCorpusLayout(const ExperimentConfig &cfg, uint64_t seed) {
  CorpusLayout layout;
  const int total = cfg.gen_train_speakers + cfg.gen_heldout_speakers;
  for (int spk = 0; spk < total; ++spk) {
    Manifest &dest = spk < cfg.gen_train_speakers ? layout.train : layout.heldout;
    for (int u = 0; u < cfg.gen_utts_per_speaker; ++u)
      dest.push_back({UtteranceName(spk, u), SpeakerName(spk),
                      SynthSource(seed, spk, u, cfg.gen_utterance_s)});
  }
  if (!layout.heldout.empty())
    layout.trials = MakeTrials(layout.heldout, cfg.gen_trials, seed);
  return layout;
}

GeneratedCorpus GenerateCorpus(const ExperimentConfig &cfg,
                               const std::string &out_dir) {
  ValidateConfig(cfg);
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  CorpusLayout layout = BuildCorpusLayout(cfg, cfg.seed);
  std::string digest_input;
  auto write_split = [&](Manifest &manifest) {
    for (auto &e : manifest) {
      auto samples = LoadWaveform(e.source, cfg.sample_rate);
      fs::path rel = fs::path("wav") / e.speaker / (e.utterance_id + ".wav");
      fs::create_directories(fs::path(out_dir) / rel.parent_path(), ec);
      if (ec) throw IoError("cannot create directory under " + out_dir);
      std::string path = (fs::path(out_dir) / rel).string();
      WriteWav(samples, cfg.sample_rate, path);
      digest_input += e.utterance_id + " " + Sha256OfFile(path) + "\n";
      e.source = rel.string();
    }
  };
  write_split(layout.train);
  write_split(layout.heldout);
  GeneratedCorpus out;
  out.train_manifest = (fs::path(out_dir) / "train.manifest").string();
  out.heldout_manifest = (fs::path(out_dir) / "heldout.manifest").string();
  out.trials = (fs::path(out_dir) / "trials.txt").string();
  WriteManifest(layout.train, out.train_manifest);
  WriteManifest(layout.heldout, out.heldout_manifest);
  WriteTrialList(layout.trials, out.trials);
  digest_input += Sha256OfFile(out.train_manifest) + "\n";
  digest_input += Sha256OfFile(out.heldout_manifest) + "\n";
  digest_input += Sha256OfFile(out.trials) + "\n";
  out.num_speakers = cfg.gen_train_speakers + cfg.gen_heldout_speakers;
  out.num_utterances =
      static_cast<int>(layout.train.size() + layout.heldout.size());
  out.hash = Sha256Hex(digest_input);
  return out;
}

}  // namespace classaug

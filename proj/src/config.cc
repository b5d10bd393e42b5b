// config.cc

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

#include "classaug/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "classaug/errors.h"

namespace classaug {

std::string ModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kBaseline: return "baseline";
    case TrainMode::kLsyn: return "lsyn";
    case TrainMode::kAt: return "at";
    case TrainMode::kAtSd: return "at+sd";
    case TrainMode::kFull: return "full";
  }
  return "unknown";
}

TrainMode ParseMode(const std::string &name) {
  if (name == "baseline") return TrainMode::kBaseline;
  if (name == "lsyn") return TrainMode::kLsyn;
  if (name == "at") return TrainMode::kAt;
  if (name == "at+sd") return TrainMode::kAtSd;
  if (name == "full") return TrainMode::kFull;
  throw ParseError("unknown training mode '" + name +
                   "' (expected baseline|lsyn|at|at+sd|full)");
}

bool ModeUsesSyntheticLoss(TrainMode mode) {
  return mode == TrainMode::kLsyn || mode == TrainMode::kFull;
}

bool ModeUsesAdversary(TrainMode mode) {
  return mode == TrainMode::kAt || mode == TrainMode::kAtSd ||
         mode == TrainMode::kFull;
}

bool ModeUsesSemanticDiscriminator(TrainMode mode) {
  return mode == TrainMode::kAtSd || mode == TrainMode::kFull;
}

int ExperimentConfig::WindowSamples() const {
  return static_cast<int>(std::lround(sample_rate * window_ms / 1000.0));
}

int ExperimentConfig::HopSamples() const {
  return static_cast<int>(std::lround(sample_rate * hop_ms / 1000.0));
}

int ExperimentConfig::SegmentSamples() const {
  return static_cast<int>(std::lround(sample_rate * segment_s));
}

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string FormatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double ToDouble(const std::string &s) {
  const char *begin = s.data();
  const char *end = begin + s.size();
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ParseError("expected a real number, got '" + s + "'");
  return x;
}

template <typename Int>
Int ToInt(const std::string &s) {
  const char *begin = s.data();
  const char *end = begin + s.size();
  Int x = 0;
  auto [ptr, ec] = std::from_chars(begin, end, x);
  if (ec != std::errc() || ptr != end)
    throw ParseError("expected an integer, got '" + s + "'");
  return x;
}

bool ToBool(const std::string &s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError("expected true or false, got '" + s + "'");
}

std::vector<std::string> SplitCommas(const std::string &s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(Trim(item));
  return parts;
}

struct Field {
  const char *key;
  std::function<std::string(const ExperimentConfig &)> get;
  std::function<void(ExperimentConfig &, const std::string &)> set;
};

template <typename T>
Field IntField(const char *key, T ExperimentConfig::*member) {
  return {key,
          [member](const ExperimentConfig &c) {
            return std::to_string(c.*member);
          },
          [member](ExperimentConfig &c, const std::string &v) {
            c.*member = ToInt<T>(v);
          }};
}

Field DoubleField(const char *key, double ExperimentConfig::*member) {
  return {key,
          [member](const ExperimentConfig &c) {
            return FormatDouble(c.*member);
          },
          [member](ExperimentConfig &c, const std::string &v) {
            c.*member = ToDouble(v);
          }};
}

Field BoolField(const char *key, bool ExperimentConfig::*member) {
  return {key,
          [member](const ExperimentConfig &c) {
            return std::string(c.*member ? "true" : "false");
          },
          [member](ExperimentConfig &c, const std::string &v) {
            c.*member = ToBool(v);
          }};
}

const std::vector<Field> &Fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> fields = {
      IntField("sample_rate", &C::sample_rate),
      IntField("fbank_dims", &C::fbank_dims),
      DoubleField("window_ms", &C::window_ms),
      DoubleField("hop_ms", &C::hop_ms),
      IntField("fft_size", &C::fft_size),
      DoubleField("mel_low_hz", &C::mel_low_hz),
      DoubleField("mel_high_hz", &C::mel_high_hz),
      DoubleField("segment_s", &C::segment_s),
      IntField("embed_dim", &C::embed_dim),
      IntField("encoder_channels", &C::encoder_channels),
      DoubleField("margin", &C::margin),
      DoubleField("scale", &C::scale),
      {"mode", [](const C &c) { return ModeName(c.mode); },
       [](C &c, const std::string &v) { c.mode = ParseMode(v); }},
      IntField("lambda_speakers", &C::lambda_speakers),
      DoubleField("syn_loss_weight", &C::syn_loss_weight),
      BoolField("syn_against_real", &C::syn_against_real),
      BoolField("generator_real_term", &C::generator_real_term),
      DoubleField("lambda_adv_base", &C::lambda_adv_base),
      {"lambda_adv_bounds",
       [](const C &c) {
         return FormatDouble(c.lambda_adv_bounds.first) + ", " +
                FormatDouble(c.lambda_adv_bounds.second);
       },
       [](C &c, const std::string &v) {
         auto parts = SplitCommas(v);
         if (parts.size() != 2)
           throw ParseError("expected 'min, max', got '" + v + "'");
         c.lambda_adv_bounds = {ToDouble(parts[0]), ToDouble(parts[1])};
       }},
      DoubleField("ema_beta", &C::ema_beta),
      IntField("disc_hidden", &C::disc_hidden),
      IntField("disc_heads", &C::disc_heads),
      IntField("pseudo_seq_len", &C::pseudo_seq_len),
      IntField("head_hidden", &C::head_hidden),
      IntField("head_blocks", &C::head_blocks),
      DoubleField("dropout", &C::dropout),
      IntField("backbone_depth", &C::backbone_depth),
      {"backbone_layers",
       [](const C &c) {
         std::string out;
         for (size_t i = 0; i < c.backbone_layers.size(); ++i) {
           if (i) out += ", ";
           out += std::to_string(c.backbone_layers[i]);
         }
         return out;
       },
       [](C &c, const std::string &v) {
         c.backbone_layers.clear();
         if (Trim(v).empty()) return;
         for (const auto &p : SplitCommas(v))
           c.backbone_layers.push_back(ToInt<int>(p));
       }},
      DoubleField("lr_encoder", &C::lr_encoder),
      DoubleField("lr_discriminator", &C::lr_discriminator),
      DoubleField("weight_decay", &C::weight_decay),
      IntField("warmup_steps", &C::warmup_steps),
      DoubleField("grad_clip", &C::grad_clip),
      IntField("batch_size", &C::batch_size),
      IntField("epochs", &C::epochs),
      DoubleField("mindcf_p_target", &C::mindcf_p_target),
      DoubleField("mindcf_c_miss", &C::mindcf_c_miss),
      DoubleField("mindcf_c_fa", &C::mindcf_c_fa),
      IntField("gen_train_speakers", &C::gen_train_speakers),
      IntField("gen_heldout_speakers", &C::gen_heldout_speakers),
      IntField("gen_utts_per_speaker", &C::gen_utts_per_speaker),
      DoubleField("gen_utterance_s", &C::gen_utterance_s),
      IntField("gen_trials", &C::gen_trials),
      IntField("seed", &C::seed),
  };
  return fields;
}

void Require(bool ok, const char *field, const std::string &what) {
  if (!ok) throw ValidationError(field, what);
}

}  // namespace

const ExperimentConfig &ValidateConfig(const ExperimentConfig &c) {
  Require(c.sample_rate > 0, "sample_rate", "must be positive");
  Require(c.fbank_dims > 0, "fbank_dims", "must be positive");
  Require(c.window_ms > 0, "window_ms", "must be positive");
  Require(c.hop_ms > 0, "hop_ms", "must be positive");
  Require(c.fft_size >= c.WindowSamples(), "fft_size",
          "must cover one analysis window");
  Require(c.mel_low_hz >= 0 && c.mel_low_hz < c.mel_high_hz, "mel_low_hz",
          "must be nonnegative and below mel_high_hz");
  Require(c.mel_high_hz <= c.sample_rate / 2.0, "mel_high_hz",
          "must not exceed the Nyquist frequency");
  Require(c.segment_s > 0 && c.SegmentSamples() >= c.WindowSamples(),
          "segment_s", "must hold at least one analysis window");
  Require(c.embed_dim > 0, "embed_dim", "must be positive");
  Require(c.encoder_channels > 0, "encoder_channels", "must be positive");
  Require(c.margin >= 0, "margin", "must be >= 0");
  Require(c.scale > 0, "scale", "must be > 0");
  Require(c.lambda_speakers >= 0, "lambda_speakers", "must be >= 0");
  Require(c.syn_loss_weight >= 0, "syn_loss_weight", "must be >= 0");
  Require(c.lambda_adv_base >= 0, "lambda_adv_base", "must be >= 0");
  Require(c.lambda_adv_bounds.first >= 0 &&
              c.lambda_adv_bounds.first <= c.lambda_adv_bounds.second,
          "lambda_adv_bounds", "need 0 <= min <= max");
  Require(c.ema_beta > 0 && c.ema_beta < 1, "ema_beta", "must be in (0, 1)");
  Require(c.disc_hidden > 0, "disc_hidden", "must be positive");
  Require(c.disc_heads >= 1, "disc_heads", "must be >= 1");
  Require(c.pseudo_seq_len >= 1, "pseudo_seq_len", "must be >= 1");
  Require(c.head_hidden > 0, "head_hidden", "must be positive");
  Require(c.head_blocks >= 0, "head_blocks", "must be >= 0");
  Require(c.dropout >= 0 && c.dropout < 1, "dropout", "must be in [0, 1)");
  Require(c.backbone_depth >= 1, "backbone_depth", "must be >= 1");
  Require(!c.backbone_layers.empty(), "backbone_layers",
          "at least one layer is required");
  for (int layer : c.backbone_layers)
    Require(layer >= 1 && layer <= c.backbone_depth, "backbone_layers",
            "layer " + std::to_string(layer) + " outside [1, " +
                std::to_string(c.backbone_depth) + "]");
  Require(c.lr_encoder > 0, "lr_encoder", "must be > 0");
  Require(c.lr_discriminator > 0, "lr_discriminator", "must be > 0");
  Require(c.weight_decay >= 0, "weight_decay", "must be >= 0");
  Require(c.warmup_steps >= 0, "warmup_steps", "must be >= 0");
  Require(c.grad_clip > 0, "grad_clip", "must be > 0");
  Require(c.batch_size >= 2, "batch_size", "must be >= 2");
  Require(c.epochs >= 1, "epochs", "must be >= 1");
  Require(c.mindcf_p_target > 0 && c.mindcf_p_target < 1, "mindcf_p_target",
          "must be in (0, 1)");
  Require(c.mindcf_c_miss > 0, "mindcf_c_miss", "must be > 0");
  Require(c.mindcf_c_fa > 0, "mindcf_c_fa", "must be > 0");
  Require(c.gen_train_speakers >= 2, "gen_train_speakers", "must be >= 2");
  Require(c.gen_heldout_speakers >= 0, "gen_heldout_speakers",
          "must be >= 0");
  Require(c.gen_utts_per_speaker >= 1, "gen_utts_per_speaker",
          "must be >= 1");
  Require(c.gen_utterance_s > 0, "gen_utterance_s", "must be > 0");
  Require(c.gen_trials >= 0, "gen_trials", "must be >= 0");
  return c;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const auto &f : Fields()) keys.push_back(f.key);
  return keys;
}

std::string ConfigToString(const ExperimentConfig &cfg) {
  std::ostringstream os;
  os << "# classaug experiment config\n";
  for (const auto &f : Fields()) os << f.key << " = " << f.get(cfg) << "\n";
  return os.str();
}

void SaveConfig(const ExperimentConfig &cfg, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << ConfigToString(cfg);
  out.flush();
  if (!out) throw IoError("error writing " + path);
}

ExperimentConfig ParseConfig(const std::string &text,
                             const std::string &source) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    std::string where = source + ":" + std::to_string(lineno);
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(where + ": expected 'key = value'");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    const Field *field = nullptr;
    for (const auto &f : Fields())
      if (key == f.key) field = &f;
    if (field == nullptr)
      throw ParseError(where + ": unknown key '" + key + "'");
    try {
      field->set(cfg, value);
    } catch (const ParseError &e) {
      throw ParseError(where + ": " + key + ": " + e.what());
    }
  }
  ValidateConfig(cfg);
  return cfg;
}

ExperimentConfig LoadConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path);
}

}  // namespace classaug

// io.cc

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

#include "classaug/io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "classaug/errors.h"

namespace classaug {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> Tokens(const std::string &line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool IsBlankOrComment(const std::string &line) {
  size_t b = line.find_first_not_of(" \t\r");
  return b == std::string::npos || line[b] == '#';
}

void PutU32(std::string &out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void PutU16(std::string &out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

uint32_t GetU32(const std::string &s, size_t at) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}

uint16_t GetU16(const std::string &s, size_t at) {
  return static_cast<uint16_t>(static_cast<unsigned char>(s[at]) |
                               (static_cast<unsigned char>(s[at + 1]) << 8));
}

int16_t ToPcm16(double x) {
  double scaled = std::round(x * 32768.0);
  scaled = std::clamp(scaled, -32768.0, 32767.0);
  return static_cast<int16_t>(scaled);
}

}  // namespace

TrialList ReadTrialList(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trial list " + path);
  TrialList list;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlankOrComment(line)) continue;
    auto tok = Tokens(line);
    if (tok.size() != 3 || (tok[0] != "0" && tok[0] != "1"))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 'label enroll_id test_id' with label 0|1");
    list.trials.push_back({tok[0] == "1", tok[1], tok[2]});
  }
  return list;
}

void WriteTrialList(const TrialList &trials, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto &t : trials.trials)
    out << (t.is_target ? 1 : 0) << ' ' << t.enroll_id << ' ' << t.test_id
        << '\n';
  if (!out) throw IoError("error writing " + path);
}

Manifest ReadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  fs::path dir = fs::path(path).parent_path();
  Manifest manifest;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (IsBlankOrComment(line)) continue;
    auto tok = Tokens(line);
    if (tok.size() != 3)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 'utterance_id speaker source'");
    std::string source = tok[2];
    if (source.rfind("synth:", 0) != 0 && fs::path(source).is_relative())
      source = (dir / source).string();
    manifest.push_back({tok[0], tok[1], source});
  }
  return manifest;
}

void WriteManifest(const Manifest &manifest, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto &e : manifest)
    out << e.utterance_id << ' ' << e.speaker << ' ' << e.source << '\n';
  if (!out) throw IoError("error writing " + path);
}

std::vector<double> QuantizePcm16(const std::vector<double> &samples) {
  std::vector<double> out(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    out[i] = ToPcm16(samples[i]) / 32768.0;
  return out;
}

void WriteWav(const std::vector<double> &samples, int sample_rate,
              const std::string &path) {
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  std::string bytes;
  bytes.reserve(44 + data_bytes);
  bytes += "RIFF";
  PutU32(bytes, 36 + data_bytes);
  bytes += "WAVEfmt ";
  PutU32(bytes, 16);
  PutU16(bytes, 1);  // PCM
  PutU16(bytes, 1);  // mono
  PutU32(bytes, static_cast<uint32_t>(sample_rate));
  PutU32(bytes, static_cast<uint32_t>(sample_rate) * 2);
  PutU16(bytes, 2);
  PutU16(bytes, 16);
  bytes += "data";
  PutU32(bytes, data_bytes);
  for (double x : samples) PutU16(bytes, static_cast<uint16_t>(ToPcm16(x)));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path);
}

std::vector<double> ReadWav(const std::string &path, int *sample_rate) {
  std::string s = ReadFileBytes(path);
  if (s.size() < 12 || s.compare(0, 4, "RIFF") != 0 ||
      s.compare(8, 4, "WAVE") != 0)
    throw ParseError(path + ": not a RIFF/WAVE file");
  size_t pos = 12;
  bool have_fmt = false;
  uint32_t rate = 0;
  while (pos + 8 <= s.size()) {
    std::string id = s.substr(pos, 4);
    uint32_t size = GetU32(s, pos + 4);
    size_t body = pos + 8;
    if (body + size > s.size()) throw ParseError(path + ": truncated chunk");
    if (id == "fmt ") {
      if (size < 16) throw ParseError(path + ": short fmt chunk");
      uint16_t format = GetU16(s, body), channels = GetU16(s, body + 2);
      uint16_t bits = GetU16(s, body + 14);
      rate = GetU32(s, body + 4);
      if (format != 1 || channels != 1 || bits != 16)
        throw ParseError(path + ": only 16-bit PCM mono is supported");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError(path + ": data chunk before fmt");
      std::vector<double> samples(size / 2);
      for (size_t i = 0; i < samples.size(); ++i)
        samples[i] = static_cast<int16_t>(GetU16(s, body + 2 * i)) / 32768.0;
      if (sample_rate) *sample_rate = static_cast<int>(rate);
      return samples;
    }
    pos = body + size + (size & 1);
  }
  throw ParseError(path + ": no data chunk");
}

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Sha256Hex(const std::string &bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                  nullptr))
    throw Error("SHA-256 failed");
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string Sha256OfFile(const std::string &path) {
  return Sha256Hex(ReadFileBytes(path));
}

}  // namespace classaug

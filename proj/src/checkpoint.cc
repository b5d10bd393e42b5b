// checkpoint.cc

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

#include "classaug/checkpoint.h"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "json.hpp"

#include "classaug/errors.h"
#include "classaug/io.h"

namespace classaug {

namespace fs = std::filesystem;

namespace {

constexpr char kTensorMagic[] = "CLASSAUG-TENSORS\n";
constexpr char kTensorEnd[] = "END\n";

using TensorMap = std::map<std::string, Matrix>;

template <typename T>
void Put(std::string *out, const T &v) {
  out->append(reinterpret_cast<const char *>(&v), sizeof(T));
}

std::string EncodeTensors(const std::vector<std::pair<std::string, const Matrix *>> &tensors) {
  std::string out(kTensorMagic);
  Put(&out, static_cast<uint32_t>(tensors.size()));
  for (const auto &[name, m] : tensors) {
    Put(&out, static_cast<uint32_t>(name.size()));
    out += name;
    Put(&out, static_cast<int64_t>(m->rows()));
    Put(&out, static_cast<int64_t>(m->cols()));
    out.append(reinterpret_cast<const char *>(m->data()),
               sizeof(double) * static_cast<size_t>(m->size()));
  }
  out += kTensorEnd;
  return out;
}

class Reader {
 public:
  Reader(const std::string &bytes, const std::string &path)
      : bytes_(bytes), path_(path) {}

  void Read(void *dst, size_t n) {
    if (pos_ + n > bytes_.size())
      throw VersionError(path_ + " is truncated");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T Get() {
    T v;
    Read(&v, sizeof(T));
    return v;
  }
  std::string GetString(size_t n) {
    std::string s(n, '\0');
    Read(s.data(), n);
    return s;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::string &bytes_;
  std::string path_;
  size_t pos_ = 0;
};

TensorMap DecodeTensors(const std::string &path) {
  const std::string bytes = ReadFileBytes(path);
  Reader r(bytes, path);
  if (r.GetString(std::strlen(kTensorMagic)) != kTensorMagic)
    throw VersionError(path + " is not a tensor file");
  const uint32_t count = r.Get<uint32_t>();
  TensorMap tensors;
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = r.GetString(r.Get<uint32_t>());
    const int64_t rows = r.Get<int64_t>(), cols = r.Get<int64_t>();
    if (rows < 0 || cols < 0 || rows * cols > (int64_t{1} << 32))
      throw VersionError(path + ": bad shape for " + name);
    Matrix m(rows, cols);
    r.Read(m.data(), sizeof(double) * static_cast<size_t>(m.size()));
    tensors.emplace(name, std::move(m));
  }
  if (r.GetString(std::strlen(kTensorEnd)) != kTensorEnd || !r.AtEnd())
    throw VersionError(path + " has a corrupt trailer");
  return tensors;
}

void WriteBytes(const fs::path &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

void Restore(const TensorMap &tensors, const std::string &name, Matrix *dst) {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw VersionError("checkpoint has no tensor " + name);
  if (it->second.rows() != dst->rows() || it->second.cols() != dst->cols())
    throw VersionError("tensor " + name + " has shape " +
                       std::to_string(it->second.rows()) + "x" +
                       std::to_string(it->second.cols()) + ", expected " +
                       std::to_string(dst->rows()) + "x" +
                       std::to_string(dst->cols()));
  *dst = it->second;
}

void AddMoments(const std::string &prefix, nn::AdamW &opt,
                std::vector<std::pair<std::string, const Matrix *>> *out) {
  for (size_t i = 0; i < opt.params().size(); ++i) {
    out->push_back({prefix + ".m/" + opt.params()[i]->name, &opt.first_moments()[i]});
    out->push_back({prefix + ".v/" + opt.params()[i]->name, &opt.second_moments()[i]});
  }
}

void RestoreMoments(const TensorMap &tensors, const std::string &prefix,
                    nn::AdamW &opt) {
  for (size_t i = 0; i < opt.params().size(); ++i) {
    Restore(tensors, prefix + ".m/" + opt.params()[i]->name, &opt.first_moments()[i]);
    Restore(tensors, prefix + ".v/" + opt.params()[i]->name, &opt.second_moments()[i]);
  }
}

nlohmann::json ReadState(const std::string &dir) {
  const fs::path version = fs::path(dir) / "VERSION";
  if (!fs::exists(version)) throw IoError("not a checkpoint: " + dir);
  std::string tag = ReadFileBytes(version.string());
  while (!tag.empty() && (tag.back() == '\n' || tag.back() == '\r')) tag.pop_back();
  if (tag != kCheckpointVersion)
    throw VersionError("checkpoint format '" + tag + "' is not '" +
                       kCheckpointVersion + "'");
  try {
    return nlohmann::json::parse(ReadFileBytes((fs::path(dir) / "state.json").string()));
  } catch (const nlohmann::json::exception &e) {
    throw VersionError("unreadable checkpoint state: " + std::string(e.what()));
  }
}

}  // namespace

void SaveCheckpoint(Trainer &trainer, const std::string &dir) {
  const fs::path target(dir);
  const fs::path tmp = target.string() + ".tmp";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp, ec);
  if (ec) throw IoError("cannot create " + tmp.string() + ": " + ec.message());

  WriteBytes(tmp / "VERSION", std::string(kCheckpointVersion) + "\n");
  SaveConfig(trainer.config(), (tmp / "config.conf").string());

  std::vector<std::pair<std::string, const Matrix *>> params;
  for (const nn::Buffer &b : trainer.NamedTensors()) params.push_back({b.name, b.value});
  WriteBytes(tmp / "params.bin", EncodeTensors(params));

  std::vector<std::pair<std::string, const Matrix *>> moments;
  AddMoments("encoder", trainer.encoder_optimizer(), &moments);
  if (nn::AdamW *d = trainer.discriminator_optimizer())
    AddMoments("discriminator", *d, &moments);
  WriteBytes(tmp / "optimizer.bin", EncodeTensors(moments));

  const TrainState &s = trainer.state();
  nlohmann::ordered_json j;
  j["version"] = kCheckpointVersion;
  j["step"] = s.step;
  j["epoch"] = s.epoch;
  j["ratio_ema"] = s.ratio_ema;
  j["lambda_adv"] = s.lambda_adv;
  j["num_classes"] = trainer.num_classes();
  j["embed_dim"] = trainer.config().embed_dim;
  j["mode"] = ModeName(trainer.config().mode);
  j["encoder_optimizer_steps"] = trainer.encoder_optimizer().steps();
  j["discriminator_optimizer_steps"] =
      trainer.discriminator_optimizer() ? trainer.discriminator_optimizer()->steps() : 0;
  j["data_rng"] = s.data_rng.Serialize();
  j["model_rng"] = s.model_rng.Serialize();
  WriteBytes(tmp / "state.json", j.dump(1) + "\n");

  fs::remove_all(target, ec);
  fs::create_directories(target.parent_path(), ec);
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot move checkpoint into " + dir + ": " + ec.message());
}

ExperimentConfig CheckpointConfig(const std::string &dir) {
  ReadState(dir);
  return LoadConfig((fs::path(dir) / "config.conf").string());
}

void LoadCheckpoint(const std::string &dir, Trainer *trainer) {
  nlohmann::json j = ReadState(dir);
  try {
    const int embed_dim = j.at("embed_dim").get<int>();
    if (embed_dim != trainer->config().embed_dim)
      throw VersionError("embed_dim mismatch: checkpoint has " +
                         std::to_string(embed_dim) + ", config has " +
                         std::to_string(trainer->config().embed_dim));
    const int classes = j.at("num_classes").get<int>();
    if (classes != trainer->num_classes())
      throw VersionError("num_classes mismatch: checkpoint has " +
                         std::to_string(classes) + ", trainer has " +
                         std::to_string(trainer->num_classes()));
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != ModeName(trainer->config().mode))
      throw VersionError("mode mismatch: checkpoint has " + mode +
                         ", config has " + ModeName(trainer->config().mode));

    const TensorMap params = DecodeTensors((fs::path(dir) / "params.bin").string());
    for (const nn::Buffer &b : trainer->NamedTensors()) Restore(params, b.name, b.value);
    const TensorMap moments = DecodeTensors((fs::path(dir) / "optimizer.bin").string());
    RestoreMoments(moments, "encoder", trainer->encoder_optimizer());
    trainer->encoder_optimizer().set_steps(j.at("encoder_optimizer_steps").get<int64_t>());
    if (nn::AdamW *d = trainer->discriminator_optimizer()) {
      RestoreMoments(moments, "discriminator", *d);
      d->set_steps(j.at("discriminator_optimizer_steps").get<int64_t>());
    }

    TrainState &s = trainer->state();
    s.step = j.at("step").get<int64_t>();
    s.epoch = j.at("epoch").get<int>();
    s.ratio_ema = j.at("ratio_ema").get<double>();
    s.lambda_adv = j.at("lambda_adv").get<double>();
    s.data_rng.Deserialize(j.at("data_rng").get<std::string>());
    s.model_rng.Deserialize(j.at("model_rng").get<std::string>());
  } catch (const nlohmann::json::exception &e) {
    throw VersionError("checkpoint state is missing a field: " + std::string(e.what()));
  }
}

std::unique_ptr<Trainer> RestoreTrainer(const std::string &dir) {
  ExperimentConfig cfg = CheckpointConfig(dir);
  nlohmann::json j = ReadState(dir);
  auto trainer = std::make_unique<Trainer>(cfg, j.value("num_classes", 0));
  LoadCheckpoint(dir, trainer.get());
  return trainer;
}

}  // namespace classaug

// test_datamodel.cc

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

#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "classaug/config.h"
#include "classaug/errors.h"
#include "classaug/io.h"
#include "classaug/types.h"
#include "test_util.h"

using namespace classaug;

namespace {

std::string ErrorField(const ExperimentConfig &cfg) {
  try {
    ValidateConfig(cfg);
  } catch (const ValidationError &e) {
    return e.field();
  }
  return "";
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("default config is valid and carries the published hyperparameters") {
  ExperimentConfig cfg;
  CHECK(ErrorField(cfg).empty());
  CHECK(cfg.margin == 0.2);
  CHECK(cfg.scale == 30.0);
  CHECK(cfg.lr_discriminator == 2e-4);
  CHECK(cfg.lr_encoder == 1e-3);
  CHECK(cfg.weight_decay == 1e-7);
  CHECK(cfg.warmup_steps == 2000);
  CHECK(cfg.batch_size == 50);
  CHECK(cfg.fbank_dims == 80);
  CHECK(cfg.window_ms == 25.0);
  CHECK(cfg.hop_ms == 10.0);
  CHECK(cfg.segment_s == 3.0);
  CHECK(cfg.backbone_layers == std::vector<int>{7, 9, 11, 12});
}

TEST_CASE("validation names the first offending field") {
  ExperimentConfig cfg;
  cfg.margin = -0.1;
  CHECK(ErrorField(cfg) == "margin");
  cfg = {};
  cfg.ema_beta = 1.0;
  CHECK(ErrorField(cfg) == "ema_beta");
  cfg = {};
  cfg.scale = 0.0;
  CHECK(ErrorField(cfg) == "scale");
  cfg = {};
  cfg.lambda_adv_bounds = {0.5, 0.1};
  CHECK(ErrorField(cfg) == "lambda_adv_bounds");
  cfg = {};
  cfg.backbone_layers = {7, 13};
  CHECK(ErrorField(cfg) == "backbone_layers");
  cfg = {};
  cfg.batch_size = 1;
  CHECK(ErrorField(cfg) == "batch_size");
  cfg = {};
  cfg.margin = -1;
  cfg.scale = -1;
  CHECK(ErrorField(cfg) == "margin");
}

TEST_CASE("config save and load round trip") {
  const std::string dir = testing::TempDir("config");
  ExperimentConfig cfg;
  SUBCASE("defaults") {}
  SUBCASE("every field changed") {
    cfg.margin = 0.35;
    cfg.scale = 12.5;
    cfg.mode = TrainMode::kAt;
    cfg.lambda_adv_bounds = {0.0, 0.25};
    cfg.backbone_layers = {1, 3};
    cfg.syn_against_real = false;
    cfg.generator_real_term = false;
    cfg.weight_decay = 1.0 / 3.0;
    cfg.seed = 18446744073709551615ull;
  }
  const std::string path = dir + "/c.conf";
  SaveConfig(cfg, path);
  CHECK(LoadConfig(path) == cfg);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config reader errors") {
  const std::string dir = testing::TempDir("config-err");
  CHECK_THROWS_AS(LoadConfig(dir + "/missing.conf"), IoError);

  WriteText(dir + "/unknown.conf", "margin = 0.2\nwarp_factor = 9\n");
  try {
    LoadConfig(dir + "/unknown.conf");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(std::string(e.what()).find("warp_factor") != std::string::npos);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseConfig("scale = abc\n"), ParseError);
  CHECK_THROWS_AS(ParseConfig("scale 30\n"), ParseError);
  CHECK_THROWS_AS(ParseConfig("mode = sideways\n"), ParseError);
  CHECK_THROWS_AS(ParseConfig("margin = -0.5\n"), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config comments and partial files") {
  ExperimentConfig cfg = ParseConfig(
      "# header\n\n  scale = 16   # trailing\nbackbone_layers = 2, 4\n");
  CHECK(cfg.scale == 16.0);
  CHECK(cfg.backbone_layers == std::vector<int>{2, 4});
  CHECK(cfg.margin == 0.2);
}

TEST_CASE("every config key is written") {
  std::string text = ConfigToString(ExperimentConfig());
  for (const std::string &key : ConfigKeys())
    CHECK(text.find("\n" + key + " = ") != std::string::npos);
}

TEST_CASE("training modes") {
  for (const char *name : {"baseline", "lsyn", "at", "at+sd", "full"})
    CHECK(ModeName(ParseMode(name)) == name);
  CHECK_THROWS_AS(ParseMode("gan"), ParseError);
  CHECK_FALSE(ModeUsesSyntheticLoss(TrainMode::kBaseline));
  CHECK_FALSE(ModeUsesAdversary(TrainMode::kLsyn));
  CHECK(ModeUsesSyntheticLoss(TrainMode::kLsyn));
  CHECK_FALSE(ModeUsesSyntheticLoss(TrainMode::kAt));
  CHECK_FALSE(ModeUsesSemanticDiscriminator(TrainMode::kAt));
  CHECK(ModeUsesSemanticDiscriminator(TrainMode::kAtSd));
  CHECK_FALSE(ModeUsesSyntheticLoss(TrainMode::kAtSd));
  CHECK(ModeUsesSyntheticLoss(TrainMode::kFull));
  CHECK(ModeUsesAdversary(TrainMode::kFull));
  CHECK(ModeUsesSemanticDiscriminator(TrainMode::kFull));
}

TEST_CASE("embedding batch validation") {
  EmbeddingBatch b{Matrix::Ones(2, 3), {0, 1}, false};
  CHECK_NOTHROW(b.Validate());
  b.labels = {0, -1};
  CHECK_THROWS_AS(b.Validate(), ValidationError);
  b.labels = {0};
  CHECK_THROWS_AS(b.Validate(), ValidationError);
  b.labels = {0, 1};
  b.embeddings(1, 1) = std::nan("");
  CHECK_THROWS_AS(b.Validate(), ValidationError);
  EmbeddingBatch empty;
  CHECK_THROWS_AS(empty.Validate(), ValidationError);
}

TEST_CASE("synthetic batch checker catches each corruption") {
  EmbeddingBatch batch{Matrix(3, 2), {0, 1, 1}, false};
  batch.embeddings << 2, 0, 0, 2, 4, 4;
  ClassifierWeights w{Matrix(2, 3)};
  w.w << 1, 0, 0.9, 0, 1, 0.1;
  SyntheticBatch good;
  good.num_real_classes = 3;
  good.embeddings.resize(3, 2);
  good.embeddings << 1, 1, 1, 1, 3, 2;
  good.weights.resize(2, 3);
  good.weights << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  good.labels = {3, 3, 3};
  good.pair_map = {{0, 1}, {1, 0}, {1, 0}};
  good.partner_rows = {1, 0, 0};
  CHECK(CheckSyntheticBatch(batch, w, good) == "");

  SyntheticBatch bad = good;
  bad.labels[0] = 2;
  CHECK(CheckSyntheticBatch(batch, w, bad).rfind("label_disjointness", 0) == 0);
  bad = good;
  bad.labels[2] = 4;
  CHECK(CheckSyntheticBatch(batch, w, bad).rfind("pair_registry", 0) == 0);
  bad = good;
  bad.embeddings(2, 0) = 3.0000000001;
  CHECK(CheckSyntheticBatch(batch, w, bad).rfind("midpoint", 0) == 0);
  bad = good;
  bad.weights(1, 0) = 0.6;
  CHECK(CheckSyntheticBatch(batch, w, bad).rfind("midpoint", 0) == 0);
  bad = good;
  bad.pair_map[0] = {0, 0};
  CHECK(CheckSyntheticBatch(batch, w, bad).rfind("distinct_parents", 0) == 0);
}

TEST_CASE("trial list files") {
  const std::string dir = testing::TempDir("trials");
  TrialList t{{{true, "a", "b"}, {false, "a", "c"}}};
  WriteTrialList(t, dir + "/t.txt");
  CHECK(ReadTrialList(dir + "/t.txt").trials == t.trials);
  CHECK_NOTHROW(t.Validate());

  WriteText(dir + "/bad.txt", "1 a b\n2 a c\n");
  try {
    ReadTrialList(dir + "/bad.txt");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  WriteText(dir + "/short.txt", "1 a\n");
  CHECK_THROWS_AS(ReadTrialList(dir + "/short.txt"), ParseError);
  CHECK_THROWS_AS(ReadTrialList(dir + "/absent.txt"), IoError);

  CHECK_THROWS_AS(TrialList{}.Validate(), ValidationError);
  CHECK_THROWS_AS((TrialList{{{true, "a", "b"}}}.Validate()), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest files resolve relative paths against their directory") {
  const std::string dir = testing::TempDir("manifest");
  std::filesystem::create_directories(dir + "/sub");
  WriteText(dir + "/sub/m.txt",
            "u1 spkA wav/u1.wav\nu2 spkB synth:1:2:3:1.5\nu3 spkB /abs/u3.wav\n");
  Manifest m = ReadManifest(dir + "/sub/m.txt");
  REQUIRE(m.size() == 3);
  CHECK(m[0].source == (std::filesystem::path(dir) / "sub" / "wav/u1.wav").string());
  CHECK(m[1].source == "synth:1:2:3:1.5");
  CHECK(m[2].source == "/abs/u3.wav");
  CHECK(m[1].speaker == "spkB");
  WriteText(dir + "/bad.txt", "u1 spkA\n");
  CHECK_THROWS_AS(ReadManifest(dir + "/bad.txt"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("wav round trip is exact after quantization") {
  const std::string dir = testing::TempDir("wav");
  Rng rng(3);
  std::vector<double> x(1000);
  for (double &v : x) v = 0.5 * rng.Normal();
  x[0] = 1.5;
  x[1] = -2.0;
  WriteWav(x, 16000, dir + "/a.wav");
  int sr = 0;
  std::vector<double> y = ReadWav(dir + "/a.wav", &sr);
  CHECK(sr == 16000);
  CHECK(y == QuantizePcm16(x));
  CHECK(y[0] == 32767.0 / 32768.0);
  CHECK(y[1] == -1.0);
  WriteText(dir + "/junk.wav", "RIFF....");
  CHECK_THROWS(ReadWav(dir + "/junk.wav", &sr));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sha256 known answers") {
  CHECK(Sha256Hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(Sha256Hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

// test_trainer.cc

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
#include "json.hpp"

#include "classaug/checkpoint.h"
#include "classaug/errors.h"
#include "classaug/mixup.h"
#include "classaug/trainer.h"
#include "test_util.h"

using namespace classaug;
namespace fs = std::filesystem;

namespace {

ExperimentConfig TinyConfig() {
  ExperimentConfig cfg;
  cfg.embed_dim = 8;
  cfg.encoder_channels = 8;
  cfg.disc_hidden = 8;
  cfg.disc_heads = 2;
  cfg.head_hidden = 8;
  cfg.head_blocks = 1;
  cfg.backbone_depth = 3;
  cfg.backbone_layers = {2, 3};
  cfg.dropout = 0.0;
  cfg.segment_s = 0.2;
  cfg.batch_size = 4;
  cfg.epochs = 1;
  cfg.warmup_steps = 10;
  cfg.seed = 5;
  return cfg;
}

// Class-dependent offsets make the classes learnable.
TrainingData SyntheticData(int classes, int per_class, int frames, uint64_t seed) {
  Rng rng(seed);
  TrainingData d;
  Matrix centers = testing::Random(classes, 80, rng);
  for (int c = 0; c < classes; ++c) {
    d.speakers.push_back("spk" + std::to_string(c));
    for (int k = 0; k < per_class; ++k) {
      FbankMatrix f;
      f.frames = testing::Random(frames, 80, rng, 0.5);
      f.frames.rowwise() += centers.row(c);
      d.features.push_back(f);
      d.labels.push_back(c);
    }
  }
  return d;
}

std::vector<Matrix> Snapshot(const std::vector<nn::Parameter *> &params) {
  std::vector<Matrix> out;
  for (const nn::Parameter *p : params) out.push_back(p->value);
  return out;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("one step follows the alternating order") {
  ExperimentConfig cfg = TinyConfig();
  TrainingData data = SyntheticData(3, 2, 20, 1);
  Trainer a(cfg, 3), b(cfg, 3);
  std::span<const FbankMatrix> feats(data.features);
  std::span<const int> labels(data.labels);

  // Replay the step by hand on b.
  nn::Graph graph;
  nn::Var e = b.encoder().ForwardBatch(graph, feats);
  nn::Var w = graph.Param(b.head().weight());
  nn::Var l_real = nn::AmSoftmaxLoss(CosineLogits(e, w), labels, cfg.scale, cfg.margin);
  EmbeddingBatch real{e.value(), data.labels};
  SyntheticBatch syn = SlMixup(real, b.head().Weights());
  Discriminator &d = *b.discriminator();
  d.PowerIterate();
  nn::Graph dg;
  Rng unused(0);
  nn::Var dr = d.Forward(dg, dg.Constant(e.value()), true, unused);
  nn::Var ds = d.Forward(dg, dg.Constant(syn.embeddings), true, unused);
  dg.Backward(nn::DiscriminatorLoss(dr, ds));
  for (nn::Parameter *p : b.ModelParameters()) REQUIRE(p->grad.isZero(0));
  nn::ClipGradNorm(d.Parameters(), cfg.grad_clip);
  b.discriminator_optimizer()->Step(cfg.lr_discriminator);
  std::vector<Matrix> disc_after = Snapshot(d.Parameters());

  nn::Var e_syn = SyntheticEmbeddings(e, syn);
  nn::Var l_g = nn::GeneratorLoss(d.Forward(graph, e, true, unused),
                                  d.Forward(graph, e_syn, true, unused));
  LambdaUpdate lam = AdaptLambda(l_real.scalar(), l_g.scalar(), 1.0,
                                 LambdaRule::FromConfig(cfg));
  nn::Var l_syn = nn::SyntheticLoss(e_syn, w, SyntheticClassWeights(w, syn), syn.labels,
                                    3, cfg.scale, cfg.margin);
  nn::Var total = nn::Add(nn::Add(l_real, nn::Scale(l_syn, cfg.syn_loss_weight / 3.0)),
                          nn::Scale(l_g, lam.lambda_adv));
  b.encoder_optimizer().ZeroGrad();
  graph.Backward(total);
  nn::ClipGradNorm(b.ModelParameters(), cfg.grad_clip);
  b.encoder_optimizer().Step(cfg.lr_encoder / cfg.warmup_steps);

  StepDiagnostics diag;
  LossReport r = a.Step(feats, labels, &diag);
  CHECK(r.l_real == l_real.scalar());
  CHECK(r.l_syn == l_syn.scalar());
  CHECK(r.l_g == l_g.scalar());
  CHECK(r.lambda_adv == lam.lambda_adv);
  CHECK(r.l_total == total.scalar());
  CHECK(Snapshot(a.discriminator()->Parameters()) == disc_after);
  CHECK(Snapshot(a.ModelParameters()) == Snapshot(b.ModelParameters()));
  CHECK(r.CompositionError(a.SyntheticWeight()) < 1e-12);
  CHECK(diag.mixup_ran);
  CHECK(diag.mixup_violation.empty());
  CHECK(diag.min_synthetic_label >= 3);
  CHECK(diag.attention.max_sum_error < 1e-6);
  CHECK(a.state().step == 1);
  for (nn::Parameter *p : a.discriminator()->Parameters()) CHECK(p->grad.isZero(0));
}

TEST_CASE("two trainers from one seed report identical losses") {
  ExperimentConfig cfg = TinyConfig();
  cfg.dropout = 0.1;
  TrainingData data = SyntheticData(3, 4, 20, 2);
  Trainer a(cfg, 3), b(cfg, 3);
  for (int s = 0; s < 3; ++s) {
    std::span<const FbankMatrix> f(data.features.data() + 4 * s, 4);
    std::span<const int> l(data.labels.data() + 4 * s, 4);
    std::vector<int> mixed(l.begin(), l.end());
    mixed[0] = (mixed[0] + 1) % 3;
    LossReport ra = a.Step(f, mixed), rb = b.Step(f, mixed);
    CHECK(ra.l_total == rb.l_total);
    CHECK(ra.l_d == rb.l_d);
  }
  CHECK(a.state() == b.state());
}

TEST_CASE("learning-rate schedule") {
  ExperimentConfig cfg = TinyConfig();
  cfg.warmup_steps = 2000;
  Trainer t(cfg, 3);
  CHECK(t.EncoderLr() == cfg.lr_encoder * 1 / 2000);
  t.encoder_optimizer().set_steps(999);
  CHECK(t.EncoderLr() == cfg.lr_encoder * 1000 / 2000);
  t.encoder_optimizer().set_steps(5000);
  CHECK(t.EncoderLr() == cfg.lr_encoder);
  CHECK(t.DiscriminatorLr() == cfg.lr_discriminator);
  cfg.mode = TrainMode::kBaseline;
  CHECK(Trainer(cfg, 3).DiscriminatorLr() == 0.0);
}

TEST_CASE("single-class batches skip the augmentation") {
  ExperimentConfig cfg = TinyConfig();
  TrainingData data = SyntheticData(2, 3, 20, 3);
  Trainer t(cfg, 2);
  StepDiagnostics diag;
  std::vector<int> same{1, 1, 1};
  LossReport r = t.Step(std::span(data.features).subspan(0, 3), same, &diag);
  CHECK(diag.single_class);
  CHECK_FALSE(diag.mixup_ran);
  CHECK(r.l_syn == 0.0);
  CHECK(r.l_g == 0.0);
  CHECK(r.l_total == r.l_real);
}

TEST_CASE("baseline mode never touches the extra losses") {
  ExperimentConfig cfg = TinyConfig();
  cfg.mode = TrainMode::kBaseline;
  cfg.epochs = 2;
  TrainingData data = SyntheticData(4, 4, 30, 4);
  const std::string dir = testing::TempDir("baseline");
  TrainOptions opt;
  opt.out_dir = dir;
  Train(cfg, data, opt);
  std::ifstream in(dir + "/metrics.jsonl");
  int rows = 0;
  for (std::string line; std::getline(in, line); ++rows) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["l_syn"] == 0.0);
    CHECK(j["l_g"] == 0.0);
    CHECK(j["l_d"] == 0.0);
  }
  CHECK(rows == 8);
  fs::remove_all(dir);
}

TEST_CASE("one epoch of four batches") {
  ExperimentConfig cfg = TinyConfig();
  TrainingData data = SyntheticData(4, 4, 30, 5);
  const std::string dir = testing::TempDir("epoch");
  TrainOptions opt;
  opt.out_dir = dir;
  int observed = 0;
  opt.observer = [&](const Trainer &, const LossReport &r, const StepDiagnostics &) {
    ++observed;
    CHECK(r.AllFinite());
  };
  TrainResult res = Train(cfg, data, opt);
  CHECK(res.steps_run == 4);
  CHECK(observed == 4);
  std::ifstream in(res.metrics_path);
  std::vector<nlohmann::json> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(nlohmann::json::parse(line));
  REQUIRE(rows.size() == 4);
  for (const char *key : {"step", "epoch", "l_real", "l_syn", "l_d", "l_g", "l_total",
                          "lambda_adv", "ratio_ema", "lr_enc", "lr_disc"})
    CHECK(rows[0].contains(key));
  CHECK(rows[3]["step"] == 4);
  CHECK(rows[3]["epoch"] == 1);
  int checkpoints = 0;
  for (auto &e : fs::directory_iterator(dir + "/checkpoints")) checkpoints += e.is_directory();
  CHECK(checkpoints == 1);
  CHECK(fs::exists(dir + "/checkpoints/epoch-001/VERSION"));
  fs::remove_all(dir);
}

TEST_CASE("epoch batches") {
  Rng a(1), b(1);
  auto x = EpochBatches(10, 3, a);
  CHECK(x == EpochBatches(10, 3, b));
  REQUIRE(x.size() == 3);
  std::vector<int> seen;
  for (auto &batch : x) {
    CHECK(batch.size() == 3);
    seen.insert(seen.end(), batch.begin(), batch.end());
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::unique(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("checkpoint round trip") {
  ExperimentConfig cfg = TinyConfig();
  TrainingData data = SyntheticData(3, 4, 20, 6);
  Trainer t(cfg, 3);
  for (int s = 0; s < 2; ++s) {
    std::vector<int> l{0, 1, 2, s};
    t.Step(std::span(data.features).subspan(4 * s, 4), l);
  }
  const std::string dir = testing::TempDir("ckpt") + "/c";
  SaveCheckpoint(t, dir);
  std::unique_ptr<Trainer> r = RestoreTrainer(dir);
  CHECK(r->config() == cfg);
  CHECK(r->state() == t.state());
  auto ta = t.NamedTensors(), ra = r->NamedTensors();
  REQUIRE(ta.size() == ra.size());
  for (size_t i = 0; i < ta.size(); ++i) {
    CHECK(ta[i].name == ra[i].name);
    CHECK(*ta[i].value == *ra[i].value);
  }
  CHECK(r->encoder_optimizer().first_moments() == t.encoder_optimizer().first_moments());
  CHECK(r->encoder_optimizer().second_moments() == t.encoder_optimizer().second_moments());
  CHECK(r->encoder_optimizer().steps() == t.encoder_optimizer().steps());
  CHECK(r->discriminator_optimizer()->second_moments() ==
        t.discriminator_optimizer()->second_moments());
  // The restored trainer continues exactly like the original.
  std::vector<int> l{2, 1, 0, 0};
  auto batch = std::span(data.features).subspan(8, 4);
  CHECK(r->Step(batch, l).l_total == t.Step(batch, l).l_total);

  SUBCASE("truncated parameter file") {
    const std::string p = dir + "/params.bin";
    std::string bytes = ReadFile(p);
    std::ofstream(p, std::ios::binary | std::ios::trunc) << bytes.substr(0, bytes.size() / 2);
    Trainer fresh(cfg, 3);
    CHECK_THROWS_AS(LoadCheckpoint(dir, &fresh), VersionError);
  }
  SUBCASE("different embedding size") {
    ExperimentConfig other = cfg;
    other.embed_dim = 16;
    Trainer fresh(other, 3);
    try {
      LoadCheckpoint(dir, &fresh);
      FAIL("expected VersionError");
    } catch (const VersionError &e) {
      CHECK(std::string(e.what()).find("embed_dim") != std::string::npos);
    }
  }
  SUBCASE("wrong version tag") {
    std::ofstream(dir + "/VERSION", std::ios::trunc) << "classaug-checkpoint 0\n";
    CHECK_THROWS_AS(RestoreTrainer(dir), VersionError);
  }
  SUBCASE("missing directory") {
    CHECK_THROWS(RestoreTrainer(dir + "-absent"));
  }
  fs::remove_all(fs::path(dir).parent_path());
}

TEST_CASE("resuming reproduces the uninterrupted log") {
  ExperimentConfig cfg = TinyConfig();
  cfg.epochs = 3;
  TrainingData data = SyntheticData(4, 4, 30, 7);
  const std::string full = testing::TempDir("full"), part = testing::TempDir("part");
  TrainOptions o;
  o.out_dir = full;
  Train(cfg, data, o);
  o.out_dir = part;
  o.stop_after_epoch = 1;
  Train(cfg, data, o);
  // A row written after the checkpoint is dropped on resume.
  std::ofstream(part + "/metrics.jsonl", std::ios::app) << R"({"step":99})" << "\n";
  o.stop_after_epoch = 0;
  o.resume_from = part + "/checkpoints/epoch-001";
  TrainResult r = Train(cfg, data, o);
  CHECK(r.steps_run == 8);
  CHECK(ReadFile(full + "/metrics.jsonl") == ReadFile(part + "/metrics.jsonl"));
  CHECK(ReadFile(full + "/checkpoints/epoch-003/params.bin") ==
        ReadFile(part + "/checkpoints/epoch-003/params.bin"));
  fs::remove_all(full);
  fs::remove_all(part);
}

TEST_CASE("training separates two speakers") {
  ExperimentConfig cfg = TinyConfig();
  cfg.mode = TrainMode::kBaseline;
  cfg.epochs = 15;
  cfg.warmup_steps = 1;
  cfg.lr_encoder = 5e-3;
  TrainingData data = SyntheticData(2, 8, 30, 8);
  TrainOptions o;
  o.out_dir = testing::TempDir("sep");
  o.write_checkpoints = false;
  std::unique_ptr<Trainer> t;
  Train(cfg, data, o, &t);
  Matrix e = t->encoder().EncodeBatch(data.features);
  Matrix logits = CosineLogits(e, t->head().Weights());
  int correct = 0;
  for (int i = 0; i < data.Size(); ++i)
    correct += (logits(i, 1) > logits(i, 0)) == (data.labels[i] == 1);
  CHECK(correct > 0.9 * data.Size());
  fs::remove_all(o.out_dir);
}

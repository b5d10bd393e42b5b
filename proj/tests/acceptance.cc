// acceptance.cc

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

// Acceptance harness. Runs every acceptance criterion and prints one
// PASS/FAIL line per criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "classaug/checkpoint.h"
#include "classaug/config.h"
#include "classaug/corpus.h"
#include "classaug/discriminator.h"
#include "classaug/errors.h"
#include "classaug/eval.h"
#include "classaug/gradcheck.h"
#include "classaug/io.h"
#include "classaug/losses.h"
#include "classaug/mixup.h"
#include "classaug/pipeline.h"
#include "classaug/trainer.h"
#include "oracles.h"
#include "test_util.h"

using namespace classaug;
namespace fs = std::filesystem;

namespace {

// Criterion 1.
constexpr int kMixupBatches = 200;
constexpr double kMixupSeconds = 10.0;
// Criterion 2.
constexpr int kGradInstances = 50;
constexpr double kLossGradTol = 1e-4;
constexpr double kNetworkGradTol = 1e-3;
constexpr double kGradSeconds = 120.0;
// Criterion 3.
constexpr int kMetricScores = 12;
constexpr double kMonotoneTol = 1e-12;
constexpr double kMetricSeconds = 60.0;
// Criterion 4.
constexpr int kEquivalenceSteps = 100;
constexpr double kEquivalenceTol = 1e-9;
constexpr double kEquivalenceSeconds = 60.0;
// Criterion 5.
constexpr int kSeeds[] = {1, 2, 3, 4, 5};
constexpr int kMinWins = 3;
constexpr double kExperimentSeconds = 3600.0;
// Criterion 7.
constexpr double kAttentionTol = 1e-6;
// Criterion 8.
constexpr int kResumeEpoch = 3;

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------

Outcome MixupOracle() {
  const auto t0 = Clock::now();
  Rng rng(101);
  for (int k = 0; k < kMixupBatches; ++k) {
    const int c = 2 + static_cast<int>(rng.UniformInt(0, 6));
    const int b = 2 + static_cast<int>(rng.UniformInt(0, 14));
    const int d = 1 + static_cast<int>(rng.UniformInt(0, 15));
    ClassifierWeights w{testing::Random(d, c, rng)};
    EmbeddingBatch batch{testing::Random(b, d, rng), std::vector<int>(b)};
    for (int &l : batch.labels) l = static_cast<int>(rng.UniformInt(0, c - 1));
    if (std::all_of(batch.labels.begin(), batch.labels.end(),
                    [&](int l) { return l == batch.labels[0]; }))
      batch.labels[b - 1] = (batch.labels[0] + 1) % c;
    SyntheticBatch s = SlMixup(batch, w);
    oracle::Mixup o = oracle::SlMixup(batch.embeddings, batch.labels, w.w);
    if (s.embeddings != o.embeddings || s.labels != o.labels || s.weights != o.weights)
      return {false, "batch " + std::to_string(k) + " differs from the oracle"};
  }
  const double secs = Since(t0);
  return {secs < kMixupSeconds,
          std::to_string(kMixupBatches) + " batches bitwise equal, " + Fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------

Outcome GradientSuite() {
  const auto t0 = Clock::now();
  Rng rng(202);
  struct Worst {
    std::string name;
    double tol;
    double err = 0;
  };
  std::vector<Worst> worst{{"am_softmax", kLossGradTol},
                           {"discriminator_loss", kLossGradTol},
                           {"generator_loss", kLossGradTol},
                           {"adapter", kNetworkGradTol},
                           {"pooling", kNetworkGradTol},
                           {"discriminator", kNetworkGradTol}};
  auto probs = [&](int n) {
    return Matrix((testing::Random(n, 1, rng).array().tanh() * 0.45 + 0.5).matrix());
  };
  Rng drop(0);
  for (int k = 0; k < kGradInstances; ++k) {
    const int b = 1 + static_cast<int>(rng.UniformInt(0, 4));
    const int c = 2 + static_cast<int>(rng.UniformInt(0, 5));
    std::vector<int> y(b);
    for (int &v : y) v = static_cast<int>(rng.UniformInt(0, c - 1));
    Matrix logits = testing::Random(b, c, rng).array().tanh().matrix();
    const double m = 0.4 * rng.Uniform();
    worst[0].err = std::max(
        worst[0].err, nn::CheckInputGradients(
                          [&](nn::Graph &, const std::vector<nn::Var> &in) {
                            return nn::AmSoftmaxLoss(in[0], y, 30, m);
                          },
                          {logits})
                          .relative_error);
    const std::vector<Matrix> dr{probs(b + 1), probs(b + 2)};
    worst[1].err = std::max(worst[1].err, nn::CheckInputGradients(
                                              [](nn::Graph &, const std::vector<nn::Var> &in) {
                                                return nn::DiscriminatorLoss(in[0], in[1]);
                                              },
                                              dr)
                                              .relative_error);
    worst[2].err = std::max(worst[2].err, nn::CheckInputGradients(
                                              [](nn::Graph &, const std::vector<nn::Var> &in) {
                                                return nn::GeneratorLoss(in[0], in[1]);
                                              },
                                              dr)
                                              .relative_error);

    const uint64_t seed = 1000 + k;
    Rng init(seed);
    Adapter adapter(8, 16, 0.0, init);
    Matrix x = testing::Random(3, 8, rng);
    Matrix proj = testing::Random(3, 16, rng);
    worst[3].err = std::max(
        worst[3].err, nn::CheckParameterGradients(
                          [&](nn::Graph &g) {
                            return nn::Sum(nn::Mul(adapter.Forward(g, g.Constant(x), true, drop),
                                                   g.Constant(proj)));
                          },
                          adapter.Parameters(), 1e-5)
                          .relative_error);

    AttentivePooling pool(16, 2, init);
    Matrix h = testing::Random(8, 16, rng);
    Matrix pp = testing::Random(2, 32, rng);
    std::vector<nn::Parameter *> pool_params = pool.Parameters();
    nn::Parameter hidden("hidden", h);
    pool_params.push_back(&hidden);
    worst[4].err = std::max(
        worst[4].err, nn::CheckParameterGradients(
                          [&](nn::Graph &g) {
                            return nn::Sum(
                                nn::Mul(pool.Forward(g, g.Param(hidden), 4), g.Constant(pp)));
                          },
                          pool_params, 1e-5)
                          .relative_error);

    SemanticDiscriminator::Options o;
    o.input_dim = 8;
    o.width = 16;
    o.heads = 2;
    o.seq_len = 4;
    o.head_hidden = 16;
    o.head_blocks = 1;
    o.dropout = 0.0;
    o.layers = {1, 2};
    SemanticDiscriminator d(o, std::make_unique<StubBackbone>(16, 2, seed), seed);
    Matrix e = testing::Random(2, 8, rng);
    worst[5].err = std::max(
        worst[5].err, nn::CheckParameterGradients(
                          [&](nn::Graph &g) {
                            return nn::MeanBce(d.Forward(g, g.Constant(e), true, drop), 1);
                          },
                          d.Parameters(), 1e-5)
                          .relative_error);
  }
  const double secs = Since(t0);
  bool ok = secs < kGradSeconds;
  std::string detail;
  for (const Worst &w : worst) {
    ok = ok && w.err < w.tol;
    detail += w.name + " " + Fmt(w.err, 2) + ", ";
  }
  return {ok, std::to_string(kGradInstances) + " instances each; worst relative error: " +
                  detail + Fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------

Outcome MetricOracle() {
  const auto t0 = Clock::now();
  Rng rng(303);
  std::vector<double> scores(kMetricScores);
  for (double &s : scores) s = rng.Normal();
  int checked = 0;
  double worst_monotone = 0;
  for (int mask = 0; mask < (1 << kMetricScores); ++mask) {
    ScoredTrials st;
    st.scores = scores;
    for (int i = 0; i < kMetricScores; ++i) st.labels.push_back((mask >> i) & 1);
    if (mask == 0 || mask == (1 << kMetricScores) - 1) {
      try {
        ComputeEer(st);
        return {false, "degenerate pattern accepted"};
      } catch (const DegenerateTrialsError &) {
      }
      continue;
    }
    const double eer = ComputeEer(st).eer;
    const double dcf = ComputeMinDcf(st, 0.01, 1, 1);
    if (eer != oracle::Eer(st.scores, st.labels))
      return {false, "EER differs from the sweep at pattern " + std::to_string(mask)};
    if (dcf != oracle::MinDcf(st.scores, st.labels, 0.01, 1, 1))
      return {false, "minDCF differs from the sweep at pattern " + std::to_string(mask)};
    ScoredTrials affine = st, cubic = st;
    for (double &s : affine.scores) s = 2.5 * s + 1.0;
    for (double &s : cubic.scores) s = s * s * s + 0.5 * s;
    for (const ScoredTrials *t : {&affine, &cubic}) {
      worst_monotone = std::max(worst_monotone, std::abs(ComputeEer(*t).eer - eer));
      worst_monotone =
          std::max(worst_monotone, std::abs(ComputeMinDcf(*t, 0.01, 1, 1) - dcf));
    }
    ++checked;
  }
  const double secs = Since(t0);
  return {worst_monotone <= kMonotoneTol && secs < kMetricSeconds,
          std::to_string(checked) + " patterns exact, monotone deviation " +
              Fmt(worst_monotone, 2) + ", " + Fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------

// A stand-alone AM-Softmax trainer: encoder, head and one optimizer.
class PlainTrainer {
 public:
  explicit PlainTrainer(const ExperimentConfig &cfg, int classes)
      : cfg_(cfg),
        encoder_({.input_dim = cfg.fbank_dims,
                  .channels = cfg.encoder_channels,
                  .embed_dim = cfg.embed_dim},
                 MixSeed(cfg.seed, 1)),
        head_(cfg.embed_dim, classes, MixSeed(cfg.seed, 2)) {
    opt_ = nn::AdamW(Params(), {.weight_decay = cfg.weight_decay});
  }

  void Step(std::span<const FbankMatrix> x, std::span<const int> y) {
    nn::Graph g;
    nn::Var logits = CosineLogits(encoder_.ForwardBatch(g, x), g.Param(head_.weight()));
    nn::Var loss = nn::AmSoftmaxLoss(logits, y, cfg_.scale, cfg_.margin);
    opt_.ZeroGrad();
    g.Backward(loss);
    nn::ClipGradNorm(Params(), cfg_.grad_clip);
    opt_.Step(nn::WarmupLr(cfg_.lr_encoder, opt_.steps() + 1, cfg_.warmup_steps));
  }

  std::vector<nn::Parameter *> Params() {
    std::vector<nn::Parameter *> p = encoder_.Parameters();
    p.push_back(&head_.weight());
    return p;
  }

 private:
  ExperimentConfig cfg_;
  ReferenceEncoder encoder_;
  ClassificationHead head_;
  nn::AdamW opt_;
};

Outcome BaselineEquivalence(const ExperimentConfig &desk, const TrainingData &data) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = desk;
  cfg.mode = TrainMode::kFull;
  cfg.lambda_adv_base = 0.0;
  cfg.lambda_adv_bounds = {0.0, 0.0};
  cfg.syn_loss_weight = 0.0;
  Trainer full(cfg, data.NumClasses());
  PlainTrainer plain(cfg, data.NumClasses());
  Rng rng(404);
  const int frames = SegmentFrames(cfg);
  double worst = 0;
  for (int step = 0; step < kEquivalenceSteps; ++step) {
    std::vector<FbankMatrix> x;
    std::vector<int> y;
    for (int i = 0; i < cfg.batch_size; ++i) {
      const int k = static_cast<int>(rng.UniformInt(0, data.Size() - 1));
      x.push_back(RandomFrameCrop(data.features[k], frames, rng));
      y.push_back(data.labels[k]);
    }
    full.Step(x, y);
    plain.Step(x, y);
    auto a = full.ModelParameters(), b = plain.Params();
    for (size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, (a[i]->value - b[i]->value).cwiseAbs().maxCoeff());
  }
  const double secs = Since(t0);
  return {worst < kEquivalenceTol && secs < kEquivalenceSeconds,
          std::to_string(kEquivalenceSteps) + " steps, max deviation " + Fmt(worst, 3) +
              ", " + Fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------

struct Invariants {
  int64_t batches = 0;
  int64_t violations = 0;
  double worst_attention = 0;
  std::string first;

  void Fail(const std::string &what) {
    if (violations++ == 0) first = what;
  }

  void Observe(const Trainer &t, const LossReport &r, const StepDiagnostics &d) {
    ++batches;
    const ExperimentConfig &cfg = t.config();
    const std::string at = " at step " + std::to_string(t.state().step);
    if (!r.AllFinite()) Fail("non-finite loss" + at);
    if (d.attention.groups > 0) {
      worst_attention = std::max(worst_attention, d.attention.max_sum_error);
      if (d.attention.max_sum_error > kAttentionTol) Fail("attention sum" + at);
    }
    if (ModeUsesAdversary(cfg.mode) && d.mixup_ran &&
        (r.lambda_adv < cfg.lambda_adv_bounds.first ||
         r.lambda_adv > cfg.lambda_adv_bounds.second))
      Fail("lambda_adv out of bounds" + at);
    if (d.mixup_ran && d.min_synthetic_label < d.num_real_classes)
      Fail("synthetic label below C" + at);
    if (!d.mixup_violation.empty()) Fail(d.mixup_violation + at);
  }
};

struct RunRecord {
  double eer = 0, mindcf = 0;
  std::string dir;
};

class DeskExperiment {
 public:
  DeskExperiment(ExperimentConfig cfg, std::string workdir, const TrainingData &train,
                 Manifest heldout, TrialList trials)
      : cfg_(std::move(cfg)),
        workdir_(std::move(workdir)),
        train_(train),
        heldout_(std::move(heldout)),
        trials_(std::move(trials)) {}

  RunRecord Run(TrainMode mode, int seed, const std::string &tag, int stop_after = 0,
                const std::string &resume = "") {
    ExperimentConfig cfg = cfg_;
    cfg.mode = mode;
    cfg.seed = seed;
    TrainOptions o;
    o.out_dir = workdir_ + "/" + tag;
    o.stop_after_epoch = stop_after;
    o.resume_from = resume;
    if (resume.empty()) fs::remove_all(o.out_dir);
    o.observer = [this](const Trainer &t, const LossReport &r, const StepDiagnostics &d) {
      invariants.Observe(t, r, d);
    };
    std::unique_ptr<Trainer> trainer;
    Train(cfg, train_, o, &trainer);
    RunRecord rec;
    rec.dir = o.out_dir;
    if (stop_after == 0) {
      EvaluationOutput out = EvaluateEncoder(trainer->encoder(), cfg, heldout_, trials_,
                                             o.out_dir + "/scores.txt");
      rec.eer = out.summary.eer;
      rec.mindcf = out.summary.mindcf;
    }
    return rec;
  }

  Invariants invariants;

 private:
  ExperimentConfig cfg_;
  std::string workdir_;
  const TrainingData &train_;
  Manifest heldout_;
  TrialList trials_;
};

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

bool SameTree(const std::string &a, const std::string &b, std::string *why) {
  std::vector<fs::path> files;
  for (auto &e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  std::sort(files.begin(), files.end());
  int other = 0;
  for (auto &e : fs::recursive_directory_iterator(b)) other += e.is_regular_file();
  if (other != static_cast<int>(files.size())) {
    *why = "file counts differ";
    return false;
  }
  for (const fs::path &f : files) {
    if (f.filename() == "scores.txt") continue;
    if (ReadFile((fs::path(a) / f).string()) != ReadFile((fs::path(b) / f).string())) {
      *why = f.string() + " differs";
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"acceptance criteria"};
  std::string workdir = "acceptance-work";
  std::string config = std::string(CLASSAUG_SOURCE_DIR) + "/configs/desk.conf";
  app.add_option("--workdir", workdir, "scratch directory");
  app.add_option("--config", config, "desk-scale profile");
  std::vector<int> only;
  app.add_option("--criteria", only, "run only these criteria (6-8 need 5)");
  CLI11_PARSE(app, argc, argv);

  auto want = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  int failures = 0;
  auto report = [&](int id, const std::string &name, const Outcome &o) {
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": "
              << o.detail << std::endl;
    failures += !o.passed;
  };
  auto guarded = [&](const std::function<Outcome()> &f) {
    try {
      return f();
    } catch (const std::exception &e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  if (want(1)) report(1, "mixup-oracle", guarded(MixupOracle));
  if (want(2)) report(2, "gradient-suite", guarded(GradientSuite));
  if (want(3)) report(3, "metric-oracle", guarded(MetricOracle));
  if (!want(4) && !want(5)) return failures ? 1 : 0;

  const ExperimentConfig desk = LoadConfig(config);
  fs::create_directories(workdir);
  const GeneratedCorpus corpus = GenerateCorpus(desk, workdir + "/corpus");
  const TrainingData train = LoadTrainingData(desk, ReadManifest(corpus.train_manifest));
  std::cout << "desk corpus: " << corpus.num_speakers << " speakers, "
            << corpus.num_utterances << " utterances, hash " << corpus.hash << std::endl;

  if (want(4))
    report(4, "baseline-equivalence", guarded([&] { return BaselineEquivalence(desk, train); }));
  if (!want(5)) return failures ? 1 : 0;

  DeskExperiment exp(desk, workdir, train, ReadManifest(corpus.heldout_manifest),
                     ReadTrialList(corpus.trials));
  std::map<int, RunRecord> base, full;
  Outcome c5 = guarded([&] {
    const auto t0 = Clock::now();
    std::vector<double> be, fe;
    int wins = 0;
    std::string detail;
    for (int seed : kSeeds) {
      base[seed] = exp.Run(TrainMode::kBaseline, seed, "baseline-" + std::to_string(seed));
      full[seed] = exp.Run(TrainMode::kFull, seed, "full-" + std::to_string(seed));
      be.push_back(base[seed].eer);
      fe.push_back(full[seed].eer);
      wins += full[seed].eer < base[seed].eer;
      detail += "seed " + std::to_string(seed) + " " + Fmt(base[seed].eer) + "/" +
                Fmt(full[seed].eer) + "; ";
      std::cout << "  seed " << seed << ": baseline eer " << base[seed].eer << " mindcf "
                << base[seed].mindcf << ", full eer " << full[seed].eer << " mindcf "
                << full[seed].mindcf << std::endl;
    }
    const double secs = Since(t0);
    const double mb = Median(be), mf = Median(fe);
    return Outcome{mf <= mb && wins >= kMinWins && secs < kExperimentSeconds,
                   "median EER baseline " + Fmt(mb) + " full " + Fmt(mf) + ", full wins " +
                       std::to_string(wins) + "/" + std::to_string(std::size(kSeeds)) +
                       " (" + detail + Fmt(secs, 4) + " s)"};
  });
  report(5, "desk-experiment", c5);

  const int seed = kSeeds[0];
  report(6, "determinism", guarded([&] {
           if (!full.count(seed)) return Outcome{false, "reference run missing"};
           RunRecord again = exp.Run(TrainMode::kFull, seed, "full-repeat");
           std::string why;
           const bool same = SameTree(full[seed].dir, again.dir, &why);
           return Outcome{same, same ? "metrics log and every checkpoint byte-identical"
                                     : why};
         }));

  report(7, "invariant-sweep", guarded([&] {
           const Invariants &inv = exp.invariants;
           return Outcome{inv.batches > 0 && inv.violations == 0,
                          std::to_string(inv.batches) + " batches, " +
                              std::to_string(inv.violations) + " violations" +
                              (inv.first.empty() ? "" : " (first: " + inv.first + ")") +
                              ", worst attention sum error " + Fmt(inv.worst_attention, 2)};
         }));

  report(8, "resume-equivalence", guarded([&] {
           if (!full.count(seed)) return Outcome{false, "reference run missing"};
           exp.Run(TrainMode::kFull, seed, "full-resume", kResumeEpoch);
           char name[32];
           std::snprintf(name, sizeof(name), "epoch-%03d", kResumeEpoch);
           const std::string ckpt = workdir + "/full-resume/checkpoints/" + name;
           exp.Run(TrainMode::kFull, seed, "full-resume", 0, ckpt);
           const bool same = ReadFile(full[seed].dir + "/metrics.jsonl") ==
                             ReadFile(workdir + "/full-resume/metrics.jsonl");
           return Outcome{same, same ? "metrics log identical after resuming at epoch " +
                                           std::to_string(kResumeEpoch)
                                     : "metrics logs differ"};
         }));

  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed"
                         : std::string("acceptance: all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}

// test_autograd.cc

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

#include <functional>

#include "doctest.h"

#include "classaug/autograd.h"
#include "classaug/errors.h"
#include "classaug/gradcheck.h"
#include "classaug/optim.h"
#include "test_util.h"

using namespace classaug;
using nn::Var;

namespace {

using Fn = std::function<Var(nn::Graph &, const std::vector<Var> &)>;

// Reduces any output to a scalar with fixed random weights so every output
// entry reaches the gradient.
Var Project(const Var &y, uint64_t seed) {
  Rng rng(seed);
  Matrix w = testing::Random(static_cast<int>(y.rows()), static_cast<int>(y.cols()), rng);
  return nn::Sum(nn::Mul(y, y.graph()->Constant(w)));
}

double Check(const Fn &f, const std::vector<Matrix> &inputs) {
  return nn::CheckInputGradients(
             [&](nn::Graph &g, const std::vector<Var> &in) {
               return Project(f(g, in), 99);
             },
             inputs)
      .relative_error;
}

}  // namespace

TEST_CASE("elementwise and linear-algebra gradients") {
  Rng rng(1);
  Matrix a = testing::Random(3, 4, rng), b = testing::Random(3, 4, rng);
  Matrix c = testing::Random(4, 2, rng), row = testing::Random(1, 4, rng);
  Matrix s = testing::Random(1, 1, rng);
  CHECK(Check([](auto &, auto &in) { return nn::MatMul(in[0], in[1]); }, {a, c}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Transpose(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Add(in[0], in[1]); }, {a, b}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Sub(in[0], in[1]); }, {a, b}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Mul(in[0], in[1]); }, {a, b}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Scale(in[0], -2.5); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::AddRowBroadcast(in[0], in[1]); }, {a, row}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::ScaleByScalar(in[0], in[1]); }, {a, s}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Linear(in[0], in[1], in[2]); },
              {a, c, testing::Random(1, 2, rng)}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Mean(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::MeanRows(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Tanh(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Gelu(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Sigmoid(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::LeakyRelu(in[0]); }, {a}) < 1e-7);
}

TEST_CASE("reshaping gradients") {
  Rng rng(2);
  Matrix a = testing::Random(4, 3, rng), b = testing::Random(2, 3, rng);
  Matrix d = testing::Random(4, 2, rng);
  CHECK(Check([](auto &, auto &in) {
          Var parts[] = {in[0], in[1]};
          return nn::ConcatRows(parts);
        }, {a, b}) < 1e-7);
  CHECK(Check([](auto &, auto &in) {
          Var parts[] = {in[0], in[1]};
          return nn::ConcatCols(parts);
        }, {a, d}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::SliceRows(in[0], 1, 2); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::SliceCols(in[0], 1, 2); }, {a}) < 1e-7);
  std::vector<int> rows{3, 0, 3};
  CHECK(Check([&](auto &, auto &in) { return nn::GatherRows(in[0], rows); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::RepeatRows(in[0], 3); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::TileRows(in[0], 2); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::PadOrTruncateCols(in[0], 5); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::PadOrTruncateCols(in[0], 2); }, {a}) < 1e-7);
  std::vector<int> first{0, 1, 2}, second{1, 3, 3};
  CHECK(Check([&](auto &, auto &in) { return nn::MidpointRows(in[0], first, second); }, {a}) < 1e-7);
  std::vector<int> cf{0, 2}, cs{1, 1};
  CHECK(Check([&](auto &, auto &in) { return nn::MidpointCols(in[0], cf, cs); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::Im2Col(in[0], 3, 1); }, {a}) < 1e-7);
}

TEST_CASE("normalization and sequence gradients") {
  Rng rng(3);
  Matrix a = testing::Random(4, 5, rng);
  Matrix gamma = testing::Random(1, 5, rng), beta = testing::Random(1, 5, rng);
  CHECK(Check([](auto &, auto &in) { return nn::LayerNormRows(in[0], in[1], in[2]); },
              {a, gamma, beta}) < 1e-6);
  CHECK(Check([](auto &, auto &in) { return nn::SoftmaxRows(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::L2NormalizeRows(in[0]); }, {a}) < 1e-7);
  CHECK(Check([](auto &, auto &in) { return nn::L2NormalizeCols(in[0]); }, {a}) < 1e-7);
  Matrix scores = testing::Random(6, 1, rng);
  CHECK(Check([](auto &, auto &in) { return nn::GroupSoftmax(in[0], 3); }, {scores}) < 1e-7);
  Matrix x = testing::Random(6, 4, rng);
  CHECK(Check([](auto &, auto &in) { return nn::GroupWeightedSum(in[0], in[1], 2); },
              {scores, x}) < 1e-7);
  Vector u = testing::Random(4, 1, rng).col(0).normalized();
  Vector v = testing::Random(5, 1, rng).col(0).normalized();
  CHECK(Check([&](auto &, auto &in) { return nn::SpectralNormalize(in[0], u, v); }, {a}) < 1e-7);
}

TEST_CASE("values of selected ops") {
  nn::Graph g;
  Matrix m(2, 2);
  m << 3, 4, 0, 5;
  CHECK(nn::L2NormalizeRows(g.Constant(m)).value()(0, 0) == doctest::Approx(0.6));
  CHECK(nn::L2NormalizeCols(g.Constant(m)).value()(0, 1) == doctest::Approx(4.0 / std::sqrt(41.0)));
  Matrix z = Matrix::Zero(1, 3);
  CHECK_THROWS_AS(nn::L2NormalizeRows(g.Constant(z)), DegenerateError);
  CHECK_THROWS_AS(nn::MatMul(g.Constant(m), g.Constant(z)), DimensionError);
  Matrix sc(4, 1);
  sc << 1, 1, 5, 5;
  Matrix sm = nn::GroupSoftmax(g.Constant(sc), 2).value();
  CHECK(sm(0, 0) == 0.5);
  CHECK(sm(3, 0) == 0.5);
  Matrix x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  Matrix col = nn::Im2Col(g.Constant(x.transpose()), 3, 1).value();
  CHECK(col.rows() == 3);
  CHECK(col.cols() == 6);
  CHECK(col.row(0).head(2).isZero());
  CHECK(col(1, 0) == 1);
}

TEST_CASE("parameters receive accumulated gradients and constants none") {
  nn::Parameter p("p", Matrix::Constant(1, 1, 2.0));
  nn::Graph g;
  Var x = g.Param(p);
  Var c = g.Constant(Matrix::Constant(1, 1, 3.0));
  Var y = nn::Add(nn::Mul(x, c), nn::Mul(x, x));
  g.Backward(y);
  CHECK(p.grad(0, 0) == 7.0);
  CHECK_FALSE(g.requires_grad(c));
}

TEST_CASE("dropout") {
  Rng rng(5);
  nn::Graph g;
  Var x = g.Constant(Matrix::Ones(100, 100));
  CHECK(nn::Dropout(x, 0.1, false, rng).value() == Matrix::Ones(100, 100));
  Matrix d = nn::Dropout(x, 0.25, true, rng).value();
  const double kept = (d.array() > 0).cast<double>().mean();
  CHECK(kept == doctest::Approx(0.75).epsilon(0.03));
  CHECK(d.maxCoeff() == doctest::Approx(1.0 / 0.75));
}

TEST_CASE("AdamW matches a hand-written update") {
  nn::Parameter p("p", Matrix::Constant(1, 2, 1.0));
  nn::AdamW opt({&p}, {.beta1 = 0.9, .beta2 = 0.999, .eps = 1e-8, .weight_decay = 0.1});
  p.grad << 0.5, -2.0;
  opt.Step(0.01);
  // First step: m_hat = g, v_hat = g^2, so the update is lr * sign(g).
  const double decayed = 1.0 * (1.0 - 0.01 * 0.1);
  CHECK(p.value(0, 0) == doctest::Approx(decayed - 0.01 * 0.5 / (0.5 + 1e-8)));
  CHECK(p.value(0, 1) == doctest::Approx(decayed + 0.01 * 2.0 / (2.0 + 1e-8)));
  CHECK(opt.steps() == 1);
  p.grad << 0.5, -2.0;
  const double m = 0.9 * 0.05 + 0.1 * 0.5;  // 0.095
  const double v = 0.999 * 0.00025 + 0.001 * 0.25;
  const double mh = m / (1 - 0.81), vh = v / (1 - 0.999 * 0.999);
  const double before = p.value(0, 0);
  opt.Step(0.01);
  CHECK(p.value(0, 0) ==
        doctest::Approx(before * (1 - 0.001) - 0.01 * mh / (std::sqrt(vh) + 1e-8)));
}

TEST_CASE("gradient clipping and warmup") {
  nn::Parameter a("a", Matrix::Zero(1, 2)), b("b", Matrix::Zero(1, 1));
  a.grad << 3, 0;
  b.grad << 4;
  CHECK(nn::ClipGradNorm({&a, &b}, 1.0) == doctest::Approx(5.0));
  CHECK(a.grad(0, 0) == doctest::Approx(0.6));
  CHECK(b.grad(0, 0) == doctest::Approx(0.8));
  CHECK(nn::ClipGradNorm({&a, &b}, 10.0) == doctest::Approx(1.0));
  CHECK(a.grad(0, 0) == doctest::Approx(0.6));
  CHECK(nn::WarmupLr(1e-3, 1, 2000) == 1e-3 * 1 / 2000);
  CHECK(nn::WarmupLr(1e-3, 1000, 2000) == 1e-3 * 1000 / 2000);
  CHECK(nn::WarmupLr(1e-3, 2000, 2000) == 1e-3);
  CHECK(nn::WarmupLr(1e-3, 5000, 2000) == 1e-3);
  CHECK(nn::WarmupLr(1e-3, 1, 0) == 1e-3);
}

TEST_CASE("rng state round trip and independence of streams") {
  Rng a(42);
  for (int i = 0; i < 10; ++i) a.Normal();
  Rng b;
  b.Deserialize(a.Serialize());
  CHECK(a == b);
  CHECK(a.Normal() == b.Normal());
  CHECK(MixSeed(1, 2) != MixSeed(1, 3));
  CHECK(MixSeed(1, 2) == MixSeed(1, 2));
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    int64_t k = r.UniformInt(-2, 3);
    REQUIRE(k >= -2);
    REQUIRE(k <= 3);
    double u = r.Uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

// mixup.cc

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

#include "classaug/mixup.h"

#include <algorithm>
#include <set>

#include "classaug/errors.h"

namespace classaug {

namespace {

double g_mix_coefficient = 0.5;

}  // namespace

void SetMixCoefficientForTesting(double coefficient) {
  g_mix_coefficient = coefficient;
}

void ResetMixCoefficientForTesting() { g_mix_coefficient = 0.5; }

NeighborMap ComputeNeighbors(std::span<const int> labels_in_batch,
                             const ClassifierWeights &weights) {
  std::set<int> distinct(labels_in_batch.begin(), labels_in_batch.end());
  for (int l : distinct)
    if (l < 0 || l >= weights.NumClasses())
      throw IndexError("label " + std::to_string(l) + " outside [0, " +
                       std::to_string(weights.NumClasses()) + ")");
  if (distinct.size() < 2)
    throw SingleClassError("mixup needs at least two distinct labels");
  NeighborMap neighbor;
  for (int l : distinct) {
    int best = -1;
    double best_dist = 0.0;
    // std::set iterates in ascending order, so strict < keeps the smallest
    // label on ties.
    for (int j : distinct) {
      if (j == l) continue;
      double dist = (weights.w.col(l) - weights.w.col(j)).norm();
      if (best < 0 || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    neighbor[l] = best;
  }
  return neighbor;
}

SyntheticBatch SlMixup(const EmbeddingBatch &batch,
                       const ClassifierWeights &weights) {
  if (batch.Dim() != weights.Dim())
    throw DimensionError("mixup: embedding and weight dimensions differ");
  NeighborMap neighbor = ComputeNeighbors(batch.labels, weights);
  const int n = batch.Size();
  const int c = weights.NumClasses();
  const double a = g_mix_coefficient, b = 1.0 - g_mix_coefficient;

  SyntheticBatch syn;
  syn.num_real_classes = c;
  syn.embeddings.resize(n, batch.Dim());
  syn.weights.resize(weights.Dim(), n);
  syn.labels.resize(n);
  syn.pair_map.resize(n);
  syn.partner_rows.resize(n);
  std::map<std::pair<int, int>, int> registry;
  for (int i = 0; i < n; ++i) {
    const int l1 = batch.labels[i];
    const int l2 = neighbor.at(l1);
    const int partner = static_cast<int>(
        std::find(batch.labels.begin(), batch.labels.end(), l2) -
        batch.labels.begin());
    syn.pair_map[i] = {l1, l2};
    syn.partner_rows[i] = partner;
    syn.embeddings.row(i) =
        a * batch.embeddings.row(i) + b * batch.embeddings.row(partner);
    syn.weights.col(i) = a * weights.w.col(l1) + b * weights.w.col(l2);
    auto key = std::minmax(l1, l2);
    auto it = registry.find(key);
    if (it == registry.end())
      it = registry.emplace(key, static_cast<int>(registry.size())).first;
    syn.labels[i] = c + it->second;
  }
  return syn;
}

nn::Var SyntheticEmbeddings(const nn::Var &embeddings,
                            const SyntheticBatch &syn) {
  std::vector<int> rows(syn.Size());
  for (int i = 0; i < syn.Size(); ++i) rows[i] = i;
  return nn::MidpointRows(embeddings, rows, syn.partner_rows);
}

nn::Var SyntheticClassWeights(const nn::Var &weights,
                              const SyntheticBatch &syn) {
  const int k = syn.NumSyntheticClasses();
  std::vector<int> first(k, -1), second(k, -1);
  for (int i = 0; i < syn.Size(); ++i) {
    int cls = syn.labels[i] - syn.num_real_classes;
    if (first[cls] < 0) {
      first[cls] = syn.pair_map[i].first;
      second[cls] = syn.pair_map[i].second;
    }
  }
  return nn::MidpointCols(weights, first, second);
}

}  // namespace classaug

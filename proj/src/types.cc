// types.cc

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

#include "classaug/types.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "classaug/errors.h"

namespace classaug {

void EmbeddingBatch::Validate() const {
  if (embeddings.rows() < 1)
    throw ValidationError("embeddings", "batch is empty");
  if (static_cast<Eigen::Index>(labels.size()) != embeddings.rows())
    throw ValidationError("labels", "one label per row is required");
  if (!embeddings.allFinite())
    throw ValidationError("embeddings", "non-finite entry");
  for (int y : labels)
    if (y < 0) throw ValidationError("labels", "negative label");
}

void ClassifierWeights::Validate() const {
  if (w.rows() < 1) throw ValidationError("w", "zero embedding dimension");
  if (!w.allFinite()) throw ValidationError("w", "non-finite entry");
}

int SyntheticBatch::NumSyntheticClasses() const {
  std::set<int> distinct(labels.begin(), labels.end());
  return static_cast<int>(distinct.size());
}

void TrialList::Validate() const {
  if (trials.empty()) throw ValidationError("trials", "trial list is empty");
  bool target = false, nontarget = false;
  for (const auto &t : trials) (t.is_target ? target : nontarget) = true;
  if (!target) throw ValidationError("trials", "no target trials");
  if (!nontarget) throw ValidationError("trials", "no nontarget trials");
}

std::string CheckSyntheticBatch(const EmbeddingBatch &batch,
                                const ClassifierWeights &weights,
                                const SyntheticBatch &syn) {
  const int n = syn.Size();
  const int c = weights.NumClasses();
  if (n > batch.Size()) return "size: more synthetic rows than real rows";
  if (static_cast<int>(syn.labels.size()) != n ||
      static_cast<int>(syn.pair_map.size()) != n ||
      syn.weights.cols() != n)
    return "size: inconsistent synthetic batch fields";
  if (syn.num_real_classes != c) return "size: wrong real class count";
  std::map<std::pair<int, int>, int> label_of_pair;
  for (int i = 0; i < n; ++i) {
    auto [l1, l2] = syn.pair_map[i];
    if (syn.labels[i] < c) {
      std::ostringstream os;
      os << "label_disjointness: row " << i << " has label " << syn.labels[i]
         << " < " << c;
      return os.str();
    }
    if (l1 == l2) return "distinct_parents: row mixes a class with itself";
    if (batch.labels[i] != l1)
      return "pair_map: first parent is not the row's own label";
    auto key = std::minmax(l1, l2);
    auto [it, inserted] = label_of_pair.emplace(key, syn.labels[i]);
    if (!inserted && it->second != syn.labels[i])
      return "pair_registry: one pair maps to two synthetic labels";
    auto partner = std::find(batch.labels.begin(), batch.labels.end(), l2);
    if (partner == batch.labels.end())
      return "pair_map: partner label absent from the batch";
    int j = static_cast<int>(partner - batch.labels.begin());
    for (int k = 0; k < batch.Dim(); ++k) {
      double a = batch.embeddings(i, k), b = batch.embeddings(j, k);
      if (syn.embeddings(i, k) != 0.5 * a + 0.5 * b) {
        std::ostringstream os;
        os << "midpoint: embedding row " << i << " is not the mean of rows "
           << i << " and " << j;
        return os.str();
      }
    }
    for (int k = 0; k < weights.Dim(); ++k) {
      double a = weights.w(k, l1), b = weights.w(k, l2);
      if (syn.weights(k, i) != 0.5 * a + 0.5 * b) {
        std::ostringstream os;
        os << "midpoint: weight column " << i << " is not the mean of classes "
           << l1 << " and " << l2;
        return os.str();
      }
    }
  }
  return "";
}

}  // namespace classaug

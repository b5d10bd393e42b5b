// classaug/types.h

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

#ifndef CLASSAUG_TYPES_H_
#define CLASSAUG_TYPES_H_

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace classaug {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Per-utterance embeddings, one row each, with integer class labels.
struct EmbeddingBatch {
  Matrix embeddings;  // [B x d]
  std::vector<int> labels;
  bool is_synthetic = false;

  int Size() const { return static_cast<int>(embeddings.rows()); }
  int Dim() const { return static_cast<int>(embeddings.cols()); }
  /// Throws ValidationError.
  void Validate() const;
};

/// AM-Softmax weight matrix; column j is the anchor of class j.
struct ClassifierWeights {
  Matrix w;  // [d x C]

  int Dim() const { return static_cast<int>(w.rows()); }
  int NumClasses() const { return static_cast<int>(w.cols()); }
  void Validate() const;
};

/// Output of synthetic-label mixup for one mini-batch.
///
/// Row i mixes real row i (label pair_map[i].first) with the first real row
/// carrying label pair_map[i].second. Labels start at num_real_classes and
/// identify unordered source pairs in order of first appearance.
struct SyntheticBatch {
  Matrix embeddings;  // [B' x d]
  std::vector<int> labels;
  Matrix weights;  // [d x B'], column i belongs to row i
  std::vector<std::pair<int, int>> pair_map;
  std::vector<int> partner_rows;  // index[i] of the mixing rule
  int num_real_classes = 0;

  int Size() const { return static_cast<int>(embeddings.rows()); }
  /// Number of distinct synthetic classes in the batch.
  int NumSyntheticClasses() const;
};

/// Checks every SyntheticBatch invariant against the batch and weights it
/// was built from. Returns an empty string on success, otherwise the name of
/// the first violated invariant followed by details.
std::string CheckSyntheticBatch(const EmbeddingBatch &batch,
                                const ClassifierWeights &weights,
                                const SyntheticBatch &syn);

struct Trial {
  bool is_target = false;
  std::string enroll_id;
  std::string test_id;

  bool operator==(const Trial &) const = default;
};

struct TrialList {
  std::vector<Trial> trials;

  /// Nonempty with at least one target and one nontarget.
  void Validate() const;
};

struct ManifestEntry {
  std::string utterance_id;
  std::string speaker;
  std::string source;

  bool operator==(const ManifestEntry &) const = default;
};

using Manifest = std::vector<ManifestEntry>;

}  // namespace classaug

#endif  // CLASSAUG_TYPES_H_

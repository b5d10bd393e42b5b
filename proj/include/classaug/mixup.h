// classaug/mixup.h

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

#ifndef CLASSAUG_MIXUP_H_
#define CLASSAUG_MIXUP_H_

#include <map>
#include <span>
#include <vector>

#include "classaug/autograd.h"
#include "classaug/types.h"

namespace classaug {

/// label -> nearest other label of the batch in classifier-weight space.
using NeighborMap = std::map<int, int>;

/// For every distinct label of the batch, the batch label whose raw weight
/// column is closest in L2 distance. Ties go to the smallest label.
/// Throws SingleClassError with fewer than two distinct labels and
/// IndexError for labels outside [0, C).
NeighborMap ComputeNeighbors(std::span<const int> labels_in_batch,
                             const ClassifierWeights &weights);

/// Synthetic-label mixup. Row i mixes e[i] with the first row labelled
/// neighbor(Y[i]); the weight column mixes the two class anchors the same
/// way. Every unordered source pair gets one synthetic label, numbered
/// from C in order of first appearance.
SyntheticBatch SlMixup(const EmbeddingBatch &batch,
                       const ClassifierWeights &weights);

/// The same midpoints as SlMixup, recorded on a graph so gradients reach
/// the embeddings. Returns [B' x d].
nn::Var SyntheticEmbeddings(const nn::Var &embeddings,
                            const SyntheticBatch &syn);

/// One weight column per synthetic class (registry order), recorded on a
/// graph so gradients reach W. Returns [d x NumSyntheticClasses()].
nn::Var SyntheticClassWeights(const nn::Var &weights,
                              const SyntheticBatch &syn);

/// Fault injection for the self-test: replaces the 0.5 mixing coefficient
/// of SlMixup. Not for production use.
void SetMixCoefficientForTesting(double coefficient);
void ResetMixCoefficientForTesting();

}  // namespace classaug

#endif  // CLASSAUG_MIXUP_H_

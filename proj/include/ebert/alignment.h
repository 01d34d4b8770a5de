// Copyright 2026 The E-BERT Tools Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Linear alignment of an entity/word embedding space onto a wordpiece
// embedding space.
//
// The map W minimizes sum_x ||W src(x) - tgt(x)||^2 over the symbols x that
// both spaces share as ordinary words. Because words and entities live in
// one source space, the same W carries entity vectors into the wordpiece
// space.

#ifndef EBERT_ALIGNMENT_H_
#define EBERT_ALIGNMENT_H_

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ebert/embeddings.h"

namespace ebert {

struct AlignmentOptions {
  // Scale every source and target vector to unit length before fitting.
  bool l2_normalize = false;
};

// Fitted d_tgt x d_src map.
struct AlignmentMap {
  Matrix weights;
  int shared_count = 0;
  // Sum of squared errors at the optimum.
  double residual = 0.0;
  // Set when the source vectors do not span R^d_src; the map is then the
  // minimum-norm least-squares solution.
  bool rank_deficient = false;

  int target_dim() const { return static_cast<int>(weights.rows()); }
  int source_dim() const { return static_cast<int>(weights.cols()); }
};

// Least-squares map from the columns of `source` to the columns of `target`
// (both have one column per pair). Solved with a complete orthogonal
// decomposition of source^T.
AlignmentMap FitLinearMap(const Matrix &source, const Matrix &target);

AlignmentMap FitAlignment(const EmbeddingSpace &src, const EmbeddingSpace &tgt,
                          const std::vector<SharedSymbol> &pairs,
                          const AlignmentOptions &options = {});

// Sum of squared errors of `weights` on the column pairs.
double AlignmentObjective(const Matrix &weights, const Matrix &source,
                          const Matrix &target);

// Gathers the pair vectors into column matrices (source, target).
std::pair<Matrix, Matrix> GatherPairs(const EmbeddingSpace &src,
                                      const EmbeddingSpace &tgt,
                                      const std::vector<SharedSymbol> &pairs,
                                      const AlignmentOptions &options = {});

Vector ApplyAlignment(const AlignmentMap &map, const Vector &v);

// Entity-only space whose rows are W times the entity rows of `wiki`.
EmbeddingSpace DeriveEntitySpace(const AlignmentMap &map,
                                 const EmbeddingSpace &wiki);

// Text layout: "d_tgt d_src residual shared_count", then d_tgt rows.
void WriteAlignment(const AlignmentMap &map, std::ostream &out);
void SaveAlignment(const AlignmentMap &map, const std::filesystem::path &path);
AlignmentMap ReadAlignment(std::istream &in);
AlignmentMap LoadAlignment(const std::filesystem::path &path);

}  // namespace ebert

#endif  // EBERT_ALIGNMENT_H_

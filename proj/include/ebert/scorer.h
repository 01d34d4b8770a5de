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

// Masked-LM scoring contract.
//
// A masked LM is split into three stages: embedding lookup, a contextual
// encoder and an output head. The probability of filling a mask with
// candidate w is
//
//   p(w | X) = softmax_w( e_w . head(h) + b_w )
//
// where h is the encoder output at the mask position. The encoder is an
// interface so that a real transformer can be plugged in; the shipped
// ReferenceEncoder is a deterministic leave-one-out mean. The head is an
// affine map with exact gradients so it can be trained.

#ifndef EBERT_SCORER_H_
#define EBERT_SCORER_H_

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ebert/embeddings.h"
#include "ebert/text_input.h"

namespace ebert {

// Embeds each token: wordpieces and control tokens by the wordpiece space
// (unknown pieces fall back to "[UNK]"), entities by the entity space, Mask
// by the "[MASK]" row and an entity mask by the mean of its candidates'
// entity rows. Throws DataError for entities missing from `entities`.
std::vector<Vector> EmbedSequence(const TokenSequence &sequence,
                                  const EmbeddingSpace &wordpieces,
                                  const EmbeddingSpace *entities);

// Contextual encoder stand-in. Output length equals input length.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual std::vector<Vector> Contextualize(
      std::span<const Vector> inputs) const = 0;
};

// Position i receives the mean of all other positions; a single input maps
// to the zero vector. Throws std::invalid_argument on empty input.
class ReferenceEncoder : public Encoder {
 public:
  std::vector<Vector> Contextualize(
      std::span<const Vector> inputs) const override;
};

// head(h) = A h + c.
struct AffineHead {
  Matrix a;
  Vector c;

  static AffineHead Identity(int dim);
  static AffineHead Zero(int dim);

  int dim() const { return static_cast<int>(c.size()); }
  Vector Apply(const Vector &h) const { return a * h + c; }
};

struct ScoredCandidate {
  Vector embedding;
  double bias = 0.0;
};

// Numerically stable softmax.
std::vector<double> Softmax(std::span<const double> logits);

// softmax over e . head(h) + b. Throws std::invalid_argument if empty.
std::vector<double> ScoreCandidates(const Vector &h, const AffineHead &head,
                                    std::span<const ScoredCandidate> cands);

struct HeadGradients {
  double loss = 0.0;  // -log p(gold)
  Matrix a;
  Vector c;
  std::vector<Vector> embeddings;
  std::vector<double> biases;
};

// Exact gradients of -log p(gold) with respect to the head and to every
// candidate's embedding and bias.
HeadGradients ComputeHeadGradients(const Vector &h, const AffineHead &head,
                                   std::span<const ScoredCandidate> cands,
                                   int gold);

// Anything that can fill a single [MASK] from a fixed answer vocabulary.
class ClozeScorer {
 public:
  virtual ~ClozeScorer() = default;
  // One logit per answer symbol, in answer-vocabulary order.
  virtual std::vector<double> AnswerLogits(
      const TokenSequence &sequence, const Vocabulary &answers) const = 0;
};

// Embedding lookup + encoder + affine head over a wordpiece space.
class MaskedLm : public ClozeScorer {
 public:
  MaskedLm(std::shared_ptr<const EmbeddingSpace> wordpieces,
           std::shared_ptr<const EmbeddingSpace> entities,
           std::shared_ptr<const Encoder> encoder, AffineHead head);

  // Per-wordpiece output biases b_w (default 0).
  void SetBias(const std::string &piece, double bias) { biases_[piece] = bias; }

  const EmbeddingSpace &wordpieces() const { return *wordpieces_; }
  const EmbeddingSpace *entities() const { return entities_.get(); }
  const AffineHead &head() const { return head_; }
  const Encoder &encoder() const { return *encoder_; }

  // Encoder output at `position`.
  Vector Hidden(const TokenSequence &sequence, size_t position) const;

  std::vector<double> AnswerLogits(const TokenSequence &sequence,
                                   const Vocabulary &answers) const override;

 private:
  std::shared_ptr<const EmbeddingSpace> wordpieces_;
  std::shared_ptr<const EmbeddingSpace> entities_;
  std::shared_ptr<const Encoder> encoder_;
  AffineHead head_;
  std::unordered_map<std::string, double> biases_;
};

}  // namespace ebert

#endif  // EBERT_SCORER_H_

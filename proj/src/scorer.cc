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

#include "ebert/scorer.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "ebert/error.h"

namespace ebert {
namespace {

Vector WordpieceRow(const EmbeddingSpace &wordpieces, const std::string &piece) {
  if (auto row = wordpieces.Lookup(piece)) return *std::move(row);
  if (auto unk = wordpieces.Lookup(std::string(kUnkPiece))) {
    return *std::move(unk);
  }
  throw DataError("wordpiece '" + piece + "' and [UNK] are both missing");
}

Vector EntityRow(const EmbeddingSpace *entities, const std::string &id) {
  if (entities != nullptr) {
    if (auto row = entities->Lookup(id)) return *std::move(row);
  }
  throw DataError("entity '" + id + "' has no embedding");
}

}  // namespace

std::vector<Vector> EmbedSequence(const TokenSequence &sequence,
                                  const EmbeddingSpace &wordpieces,
                                  const EmbeddingSpace *entities) {
  if (entities != nullptr && entities->dim() != wordpieces.dim()) {
    throw std::invalid_argument(fmt::format(
        "entity dimension {} differs from wordpiece dimension {}",
        entities->dim(), wordpieces.dim()));
  }
  struct Visitor {
    const EmbeddingSpace &wordpieces;
    const EmbeddingSpace *entities;

    Vector operator()(const WordpieceToken &t) const {
      return WordpieceRow(wordpieces, t.piece);
    }
    Vector operator()(const EntityToken &t) const {
      return EntityRow(entities, t.id);
    }
    Vector operator()(const MaskToken &) const {
      return WordpieceRow(wordpieces, std::string(kMaskPiece));
    }
    Vector operator()(const EntityMaskToken &t) const {
      if (t.candidates.empty()) {
        throw std::invalid_argument("entity mask without candidates");
      }
      Vector sum = Vector::Zero(wordpieces.dim());
      for (const auto &id : t.candidates) sum += EntityRow(entities, id);
      return sum / static_cast<double>(t.candidates.size());
    }
    Vector operator()(const ControlToken &t) const {
      return WordpieceRow(wordpieces, std::string(ControlPiece(t.kind)));
    }
  };
  Visitor visitor{wordpieces, entities};
  std::vector<Vector> out;
  out.reserve(sequence.size());
  for (const auto &token : sequence.tokens) {
    out.push_back(std::visit(visitor, token));
  }
  return out;
}

std::vector<Vector> ReferenceEncoder::Contextualize(
    std::span<const Vector> inputs) const {
  if (inputs.empty()) throw std::invalid_argument("empty encoder input");
  const auto n = static_cast<double>(inputs.size());
  std::vector<Vector> out;
  out.reserve(inputs.size());
  if (inputs.size() == 1) {
    out.push_back(Vector::Zero(inputs[0].size()));
    return out;
  }
  Vector total = Vector::Zero(inputs[0].size());
  for (const auto &v : inputs) total += v;
  for (const auto &v : inputs) out.push_back((total - v) / (n - 1.0));
  return out;
}

AffineHead AffineHead::Identity(int dim) {
  return {Matrix::Identity(dim, dim), Vector::Zero(dim)};
}

AffineHead AffineHead::Zero(int dim) {
  return {Matrix::Zero(dim, dim), Vector::Zero(dim)};
}

std::vector<double> Softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax of nothing");
  double max = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max);
    sum += probs[i];
  }
  for (auto &p : probs) p /= sum;
  return probs;
}

std::vector<double> ScoreCandidates(const Vector &h, const AffineHead &head,
                                    std::span<const ScoredCandidate> cands) {
  if (cands.empty()) throw std::invalid_argument("no candidates to score");
  Vector u = head.Apply(h);
  std::vector<double> logits;
  logits.reserve(cands.size());
  for (const auto &cand : cands) logits.push_back(cand.embedding.dot(u) + cand.bias);
  return Softmax(logits);
}

HeadGradients ComputeHeadGradients(const Vector &h, const AffineHead &head,
                                   std::span<const ScoredCandidate> cands,
                                   int gold) {
  if (gold < 0 || gold >= static_cast<int>(cands.size())) {
    throw std::invalid_argument(fmt::format("gold index {} out of range", gold));
  }
  Vector u = head.Apply(h);
  auto probs = ScoreCandidates(h, head, cands);

  HeadGradients grads;
  grads.loss = -std::log(probs[gold]);
  // d loss / d logit_i = p_i - [i == gold].
  Vector du = Vector::Zero(u.size());
  grads.embeddings.reserve(cands.size());
  grads.biases.reserve(cands.size());
  for (size_t i = 0; i < cands.size(); ++i) {
    double g = probs[i] - (static_cast<int>(i) == gold ? 1.0 : 0.0);
    grads.embeddings.push_back(g * u);
    grads.biases.push_back(g);
    du += g * cands[i].embedding;
  }
  grads.c = du;
  grads.a = du * h.transpose();
  return grads;
}

MaskedLm::MaskedLm(std::shared_ptr<const EmbeddingSpace> wordpieces,
                   std::shared_ptr<const EmbeddingSpace> entities,
                   std::shared_ptr<const Encoder> encoder, AffineHead head)
    : wordpieces_(std::move(wordpieces)),
      entities_(std::move(entities)),
      encoder_(std::move(encoder)),
      head_(std::move(head)) {
  if (!wordpieces_ || !encoder_) {
    throw std::invalid_argument("masked LM needs wordpieces and an encoder");
  }
  if (head_.dim() != wordpieces_->dim() || head_.a.rows() != head_.dim() ||
      head_.a.cols() != head_.dim()) {
    throw std::invalid_argument("head dimension does not match wordpieces");
  }
}

Vector MaskedLm::Hidden(const TokenSequence &sequence, size_t position) const {
  auto embedded = EmbedSequence(sequence, *wordpieces_, entities_.get());
  auto hidden = encoder_->Contextualize(embedded);
  return hidden.at(position);
}

std::vector<double> MaskedLm::AnswerLogits(const TokenSequence &sequence,
                                           const Vocabulary &answers) const {
  Vector u = head_.Apply(Hidden(sequence, MaskPosition(sequence)));
  std::vector<double> logits;
  logits.reserve(answers.size());
  for (const auto &symbol : answers.symbols()) {
    auto row = wordpieces_->Lookup(symbol);
    if (!row) throw DataError("answer '" + symbol + "' is not a wordpiece");
    double bias = 0.0;
    if (auto it = biases_.find(symbol); it != biases_.end()) bias = it->second;
    logits.push_back(row->dot(u) + bias);
  }
  return logits;
}

}  // namespace ebert

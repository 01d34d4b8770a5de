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

// Entity linking with a masked LM.
//
// A candidate table proposes (possibly overlapping) spans, each with
// candidate entities A and priors p(a). For a span s with left context l
// and right context r the model reads
//
//   [CLS] l [E-MASK] / s * r [SEP]
//
// where [E-MASK] is embedded as the mean of the candidates' entity vectors,
// and scores A plus a null entity eps:
//
//   p(a | X) = softmax( e_a . head(h) + b_a ),  b_a = log p(a)
//
// Decoding runs J refinement passes. Pass j commits the
// k = ceil(j (m + n) / J) - m most confident non-eps spans that do not
// overlap anything committed, where m counts earlier commits and n the
// spans currently predicting an entity. Committed spans are fed back as
// entity tokens in later passes.

#ifndef EBERT_ENTITY_LINKING_H_
#define EBERT_ENTITY_LINKING_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ebert/scorer.h"
#include "ebert/text_input.h"

namespace ebert {

inline constexpr int kDefaultMaxSpan = 7;

struct Candidate {
  std::string entity;
  double prior = 0.0;

  bool operator==(const Candidate &) const = default;
};

// Surface form -> candidate entities with priors in (0, 1].
class CandidateTable {
 public:
  explicit CandidateTable(int max_span = kDefaultMaxSpan)
      : max_span_(max_span) {}

  // Throws DataError for priors outside (0, 1] or a repeated entity.
  // Returns false (and counts a rejection) when the surface is longer than
  // max_span whitespace tokens.
  bool Add(const std::string &surface, const std::string &entity,
           double prior);

  const std::vector<Candidate> *Find(const std::string &surface) const;

  // Drops candidates without an entity vector; surfaces left without
  // candidates are removed. Returns the number of dropped candidates.
  int RestrictTo(const EmbeddingSpace &entities);

  int max_span() const { return max_span_; }
  int rejected() const { return rejected_; }
  size_t size() const { return entries_.size(); }

 private:
  int max_span_;
  int rejected_ = 0;
  std::map<std::string, std::vector<Candidate>> entries_;
};

// TSV rows "surface<TAB>entity<TAB>prior"; entities may be Wikipedia URLs
// or entity symbols.
CandidateTable ReadCandidateTable(std::istream &in,
                                  int max_span = kDefaultMaxSpan);
CandidateTable LoadCandidateTable(const std::filesystem::path &path,
                                  int max_span = kDefaultMaxSpan);

enum class SpanState { kUndecided, kDecoded, kRejected };

struct CandidateSpan {
  int start = 0;
  int end = 0;  // exclusive
  std::vector<Candidate> candidates;
  SpanState state = SpanState::kUndecided;
  std::string entity;        // set when decoded
  double confidence = 0.0;   // 1 - p(eps) when decoded
};

inline bool Overlaps(int a_start, int a_end, int b_start, int b_end) {
  return a_start < b_end && b_start < a_end;
}

// Every span of up to `max_span` tokens whose space-joined text is a table
// key, ordered by (start, end).
std::vector<CandidateSpan> GenerateCandidates(
    const std::vector<std::string> &tokens, const CandidateTable &table,
    int max_span);

struct EntityAnnotation {
  int start = 0;
  int end = 0;
  std::string entity;

  bool operator==(const EntityAnnotation &) const = default;
};

enum class MaskStyle { kEntityMask, kStandardMask };

// [CLS] left [E-MASK] / span * right [SEP]. Decoded spans in the context
// are rendered as entity tokens.
TokenSequence BuildElInput(const std::vector<std::string> &tokens,
                           const CandidateSpan &span, const Vocabulary &vocab,
                           const std::vector<EntityAnnotation> &decoded,
                           MaskStyle style = MaskStyle::kEntityMask);

struct NullEntityParams {
  Vector embedding;
  double bias = 0.0;

  static NullEntityParams Zero(int dim) { return {Vector::Zero(dim), 0.0}; }
};

// Distribution over the candidates followed by eps (last entry). Throws
// std::invalid_argument for a non-positive prior or no candidates.
std::vector<double> EntityDistribution(const Vector &h, const AffineHead &head,
                                       const std::vector<Candidate> &candidates,
                                       const EmbeddingSpace &entities,
                                       const NullEntityParams &eps);

// Scores one span given the spans decoded so far.
class SpanScorer {
 public:
  virtual ~SpanScorer() = default;
  // Probabilities over span.candidates followed by eps.
  virtual std::vector<double> Distribution(
      const std::vector<std::string> &tokens, const CandidateSpan &span,
      const std::vector<EntityAnnotation> &decoded) const = 0;
};

struct LinkerParams {
  AffineHead head;
  NullEntityParams eps;
};

// Embedding lookup + encoder + trained head.
class MlmSpanScorer : public SpanScorer {
 public:
  MlmSpanScorer(std::shared_ptr<const EmbeddingSpace> wordpieces,
                std::shared_ptr<const EmbeddingSpace> entities,
                std::shared_ptr<const Encoder> encoder, LinkerParams params,
                MaskStyle style = MaskStyle::kEntityMask);

  // Encoder output at the mask position.
  Vector Hidden(const std::vector<std::string> &tokens,
                const CandidateSpan &span,
                const std::vector<EntityAnnotation> &decoded) const;

  std::vector<double> Distribution(
      const std::vector<std::string> &tokens, const CandidateSpan &span,
      const std::vector<EntityAnnotation> &decoded) const override;

  const EmbeddingSpace &entities() const { return *entities_; }
  const LinkerParams &params() const { return params_; }

 private:
  std::shared_ptr<const EmbeddingSpace> wordpieces_;
  std::shared_ptr<const EmbeddingSpace> entities_;
  std::shared_ptr<const Encoder> encoder_;
  LinkerParams params_;
  MaskStyle style_;
};

struct RefineIteration {
  int iteration = 0;  // 1-based
  int m = 0;          // decoded before this pass
  int n = 0;          // spans predicting an entity in this pass
  int k = 0;          // commit budget
  std::vector<int> committed;  // indices into the span list
};

struct RefineResult {
  std::vector<CandidateSpan> spans;  // final states, input order
  std::vector<RefineIteration> log;
};

// Runs up to `iterations` passes; stops early when no span predicts an
// entity. Undecided spans end up rejected.
RefineResult IterativeRefine(const std::vector<std::string> &tokens,
                             std::vector<CandidateSpan> spans,
                             const SpanScorer &scorer, int iterations = 3,
                             int threads = 1);

struct TrainingExample {
  Vector hidden;
  std::vector<Candidate> candidates;
  std::optional<std::string> gold;  // nullopt means eps
};

struct LinkerGradients {
  double loss = 0.0;  // mean of -log p(gold)
  Matrix head_a;
  Vector head_c;
  Vector eps_embedding;
  double eps_bias = 0.0;
};

// Mean loss over `examples` and its gradient with respect to the trainable
// parameters (entity vectors and prior biases stay fixed). Throws
// std::invalid_argument if a gold entity is not among its candidates.
LinkerGradients LinkerLossAndGradients(
    const std::vector<TrainingExample> &examples, const LinkerParams &params,
    const EmbeddingSpace &entities);

struct TrainOptions {
  int epochs = 10;
  double step_size = 0.1;
};

struct TrainResult {
  LinkerParams params;
  std::vector<double> losses;  // loss before each step, then the final loss
};

// Full-batch gradient descent.
TrainResult TrainLinker(const std::vector<TrainingExample> &examples,
                        LinkerParams params, const EmbeddingSpace &entities,
                        const TrainOptions &options);

// Canonicalizes Wikipedia entities through redirects.
class RedirectMap {
 public:
  static constexpr int kMaxDepth = 16;

  void Add(const std::string &from, const std::string &to);
  // Follows redirects to a fixpoint. Throws DataError on a cycle.
  std::string Canonical(const std::string &entity) const;
  // Throws DataError if any chain is cyclic.
  void Validate() const;
  size_t size() const { return redirects_.size(); }

 private:
  std::map<std::string, std::string> redirects_;
};

// TSV "from<TAB>to"; URLs or entity symbols. Validated on load.
RedirectMap LoadRedirects(const std::filesystem::path &path);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct StrongMatchReport {
  Prf micro;
  Prf macro;
  int true_positives = 0;
  int predictions = 0;
  int golds = 0;
};

// Precision/recall/F1 where a prediction counts only with identical start,
// end and canonical entity. Micro pools all documents, macro averages the
// per-document scores. An empty side scores 1 when the other side is empty
// as well and 0 otherwise.
StrongMatchReport StrongMatchF1(
    const std::vector<std::vector<EntityAnnotation>> &predictions,
    const std::vector<std::vector<EntityAnnotation>> &golds,
    const RedirectMap &redirects);

struct ElDocument {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<EntityAnnotation> golds;
  // Token counts per sentence; empty means one sentence.
  std::vector<int> sentence_lengths;
};

// JSON-lines {"doc_id", "tokens", "golds": [{"start","end","entity"}],
// optional "sentence_lengths"}. Throws DataError for overlapping or
// out-of-range golds.
std::vector<ElDocument> ReadElDocuments(std::istream &in);
std::vector<ElDocument> LoadElDocuments(const std::filesystem::path &path);

struct LinkOptions {
  int max_span = kDefaultMaxSpan;
  int iterations = 3;
  int threads = 1;
  int chunk_limit = 512;
};

// Token ranges of the chunks a document is linked in, split at sentence
// boundaries so each chunk's EL input fits in `chunk_limit` wordpieces.
std::vector<std::pair<int, int>> DocumentChunks(const ElDocument &doc,
                                                const Vocabulary &vocab,
                                                int chunk_limit);

struct DocumentLinks {
  std::vector<EntityAnnotation> predictions;  // document offsets
  std::vector<RefineIteration> log;           // one run per chunk
  std::vector<CandidateSpan> spans;           // document offsets
};

DocumentLinks LinkDocument(const ElDocument &doc, const CandidateTable &table,
                           const SpanScorer &scorer, const Vocabulary &vocab,
                           const LinkOptions &options = {});

struct TrainingSet {
  std::vector<TrainingExample> examples;
  int dropped = 0;  // gold entity not among the span's candidates
};

// One example per generated span: the gold entity when a gold annotation
// has the same boundaries, eps otherwise.
TrainingSet BuildTrainingSet(const std::vector<ElDocument> &docs,
                             const CandidateTable &table,
                             const MlmSpanScorer &scorer,
                             const Vocabulary &vocab,
                             const RedirectMap &redirects,
                             const LinkOptions &options = {});

}  // namespace ebert

#endif  // EBERT_ENTITY_LINKING_H_

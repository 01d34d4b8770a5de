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

#include "ebert/entity_linking.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <stdexcept>
#include <tuple>

#include <fmt/core.h>
#include <json.hpp>

#include "ebert/error.h"
#include "ebert/parallel.h"
#include "ebert/wikidata_client.h"

namespace ebert {
namespace {

using json = nlohmann::json;

std::string JoinTokens(const std::vector<std::string> &tokens, int start,
                       int end) {
  std::string out;
  for (int i = start; i < end; ++i) {
    if (i > start) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::vector<ScoredCandidate> ScoredCandidates(
    const std::vector<Candidate> &candidates, const EmbeddingSpace &entities,
    const NullEntityParams &eps) {
  if (candidates.empty()) throw std::invalid_argument("span has no candidates");
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size() + 1);
  for (const auto &c : candidates) {
    if (!(c.prior > 0.0)) {
      throw std::invalid_argument(
          fmt::format("prior of {} must be positive, got {}", c.entity, c.prior));
    }
    auto row = entities.Lookup(c.entity);
    if (!row) throw DataError("candidate " + c.entity + " has no entity vector");
    scored.push_back({*std::move(row), std::log(c.prior)});
  }
  scored.push_back({eps.embedding, eps.bias});
  return scored;
}

void AppendWordPieces(const std::string &word, const Vocabulary &vocab,
                      std::vector<Token> *tokens) {
  for (const auto &piece : TokenizeWord(word, vocab)) {
    tokens->push_back(PieceToToken(piece));
  }
}

// Context tokens [begin, end), with decoded spans inside the range rendered
// as entity tokens.
void AppendContext(const std::vector<std::string> &tokens, int begin, int end,
                   const std::vector<EntityAnnotation> &decoded,
                   const Vocabulary &vocab, std::vector<Token> *out) {
  for (int i = begin; i < end;) {
    const EntityAnnotation *hit = nullptr;
    for (const auto &d : decoded) {
      if (d.start == i && d.end <= end) {
        hit = &d;
        break;
      }
    }
    if (hit != nullptr) {
      out->push_back(Entity(hit->entity));
      i = hit->end;
    } else {
      AppendWordPieces(tokens[i], vocab, out);
      ++i;
    }
  }
}

Prf ScorePrf(int tp, int predictions, int golds) {
  Prf prf;
  prf.precision = predictions > 0 ? static_cast<double>(tp) / predictions
                                  : (golds == 0 ? 1.0 : 0.0);
  prf.recall = golds > 0 ? static_cast<double>(tp) / golds
                         : (predictions == 0 ? 1.0 : 0.0);
  double sum = prf.precision + prf.recall;
  prf.f1 = sum > 0 ? 2.0 * prf.precision * prf.recall / sum : 0.0;
  return prf;
}

}  // namespace

bool CandidateTable::Add(const std::string &surface, const std::string &entity,
                         double prior) {
  if (!(prior > 0.0 && prior <= 1.0)) {
    throw DataError(fmt::format("prior {} for '{}' -> {} is outside (0, 1]",
                                prior, surface, entity));
  }
  if (static_cast<int>(SplitWhitespace(surface).size()) > max_span_) {
    ++rejected_;
    return false;
  }
  auto &list = entries_[surface];
  for (const auto &c : list) {
    if (c.entity == entity) {
      throw DataError("duplicate candidate " + entity + " for '" + surface + "'");
    }
  }
  list.push_back({entity, prior});
  return true;
}

const std::vector<Candidate> *CandidateTable::Find(
    const std::string &surface) const {
  auto it = entries_.find(surface);
  return it == entries_.end() ? nullptr : &it->second;
}

int CandidateTable::RestrictTo(const EmbeddingSpace &entities) {
  int dropped = 0;
  for (auto it = entries_.begin(); it != entries_.end();) {
    auto &list = it->second;
    auto keep_end = std::remove_if(list.begin(), list.end(), [&](const Candidate &c) {
      return !entities.vocab().Contains(c.entity);
    });
    dropped += static_cast<int>(list.end() - keep_end);
    list.erase(keep_end, list.end());
    it = list.empty() ? entries_.erase(it) : std::next(it);
  }
  return dropped;
}

CandidateTable ReadCandidateTable(std::istream &in, int max_span) {
  CandidateTable table(max_span);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    double prior = 0.0;
    if (fields.size() != 3) {
      throw DataError(fmt::format("line {}: expected 3 tab-separated fields",
                                  line_number));
    }
    auto [ptr, ec] = std::from_chars(fields[2].data(),
                                     fields[2].data() + fields[2].size(), prior);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size()) {
      throw DataError(fmt::format("line {}: bad prior '{}'", line_number,
                                  fields[2]));
    }
    try {
      table.Add(fields[0], NormalizeEntity(fields[1]), prior);
    } catch (const DataError &e) {
      throw DataError(fmt::format("line {}: {}", line_number, e.what()));
    }
  }
  return table;
}

CandidateTable LoadCandidateTable(const std::filesystem::path &path,
                                  int max_span) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return ReadCandidateTable(in, max_span);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<CandidateSpan> GenerateCandidates(
    const std::vector<std::string> &tokens, const CandidateTable &table,
    int max_span) {
  if (max_span < 1) throw std::invalid_argument("max_span must be >= 1");
  std::vector<CandidateSpan> spans;
  const int n = static_cast<int>(tokens.size());
  for (int start = 0; start < n; ++start) {
    for (int end = start + 1; end <= std::min(n, start + max_span); ++end) {
      if (const auto *candidates = table.Find(JoinTokens(tokens, start, end))) {
        CandidateSpan span;
        span.start = start;
        span.end = end;
        span.candidates = *candidates;
        spans.push_back(std::move(span));
      }
    }
  }
  return spans;
}

TokenSequence BuildElInput(const std::vector<std::string> &tokens,
                           const CandidateSpan &span, const Vocabulary &vocab,
                           const std::vector<EntityAnnotation> &decoded,
                           MaskStyle style) {
  const int n = static_cast<int>(tokens.size());
  if (span.start < 0 || span.start >= span.end || span.end > n) {
    throw std::invalid_argument(
        fmt::format("span [{}, {}) out of range", span.start, span.end));
  }
  TokenSequence seq;
  seq.tokens.push_back(Control(ControlKind::kCls));
  AppendContext(tokens, 0, span.start, decoded, vocab, &seq.tokens);
  if (style == MaskStyle::kEntityMask) {
    EntityMaskToken mask;
    for (const auto &c : span.candidates) mask.candidates.push_back(c.entity);
    seq.tokens.push_back(std::move(mask));
  } else {
    seq.tokens.push_back(MaskToken{});
  }
  seq.tokens.push_back(Control(ControlKind::kSlash));
  for (int i = span.start; i < span.end; ++i) {
    AppendWordPieces(tokens[i], vocab, &seq.tokens);
  }
  seq.tokens.push_back(Control(ControlKind::kStar));
  AppendContext(tokens, span.end, n, decoded, vocab, &seq.tokens);
  seq.tokens.push_back(Control(ControlKind::kSep));
  return seq;
}

std::vector<double> EntityDistribution(const Vector &h, const AffineHead &head,
                                       const std::vector<Candidate> &candidates,
                                       const EmbeddingSpace &entities,
                                       const NullEntityParams &eps) {
  auto scored = ScoredCandidates(candidates, entities, eps);
  return ScoreCandidates(h, head, scored);
}

MlmSpanScorer::MlmSpanScorer(std::shared_ptr<const EmbeddingSpace> wordpieces,
                             std::shared_ptr<const EmbeddingSpace> entities,
                             std::shared_ptr<const Encoder> encoder,
                             LinkerParams params, MaskStyle style)
    : wordpieces_(std::move(wordpieces)),
      entities_(std::move(entities)),
      encoder_(std::move(encoder)),
      params_(std::move(params)),
      style_(style) {
  if (!wordpieces_ || !entities_ || !encoder_) {
    throw std::invalid_argument("span scorer needs spaces and an encoder");
  }
  const int d = wordpieces_->dim();
  if (entities_->dim() != d || params_.head.dim() != d ||
      params_.eps.embedding.size() != d) {
    throw std::invalid_argument("span scorer dimensions disagree");
  }
}

Vector MlmSpanScorer::Hidden(const std::vector<std::string> &tokens,
                             const CandidateSpan &span,
                             const std::vector<EntityAnnotation> &decoded) const {
  auto seq = BuildElInput(tokens, span, wordpieces_->vocab(), decoded, style_);
  auto hidden = encoder_->Contextualize(
      EmbedSequence(seq, *wordpieces_, entities_.get()));
  return hidden.at(MaskPosition(seq));
}

std::vector<double> MlmSpanScorer::Distribution(
    const std::vector<std::string> &tokens, const CandidateSpan &span,
    const std::vector<EntityAnnotation> &decoded) const {
  return EntityDistribution(Hidden(tokens, span, decoded), params_.head,
                            span.candidates, *entities_, params_.eps);
}

RefineResult IterativeRefine(const std::vector<std::string> &tokens,
                             std::vector<CandidateSpan> spans,
                             const SpanScorer &scorer, int iterations,
                             int threads) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  RefineResult result;
  std::vector<EntityAnnotation> decoded;

  auto overlaps_decoded = [&](const CandidateSpan &s) {
    return std::any_of(decoded.begin(), decoded.end(), [&](const auto &d) {
      return Overlaps(s.start, s.end, d.start, d.end);
    });
  };

  for (int j = 1; j <= iterations; ++j) {
    std::vector<int> active;
    for (int i = 0; i < static_cast<int>(spans.size()); ++i) {
      if (spans[i].state != SpanState::kUndecided) continue;
      if (overlaps_decoded(spans[i])) {
        spans[i].state = SpanState::kRejected;
        continue;
      }
      active.push_back(i);
    }

    std::vector<std::vector<double>> dists(active.size());
    ParallelFor(active.size(), threads, [&](size_t a) {
      dists[a] = scorer.Distribution(tokens, spans[active[a]], decoded);
    });

    struct Proposal {
      int span;
      int entity;
      double confidence;
    };
    std::vector<Proposal> proposals;
    for (size_t a = 0; a < active.size(); ++a) {
      const auto &p = dists[a];
      const int eps = static_cast<int>(p.size()) - 1;
      if (eps != static_cast<int>(spans[active[a]].candidates.size())) {
        throw std::logic_error("span scorer returned the wrong number of classes");
      }
      int best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
      if (best != eps) proposals.push_back({active[a], best, 1.0 - p[eps]});
    }

    RefineIteration step;
    step.iteration = j;
    step.m = static_cast<int>(decoded.size());
    step.n = static_cast<int>(proposals.size());
    if (step.n == 0) {
      result.log.push_back(step);
      break;
    }
    // ceil(j (m + n) / J) - m in integer arithmetic.
    long total = static_cast<long>(j) * (step.m + step.n);
    step.k = std::max(0L, (total + iterations - 1) / iterations - step.m);

    std::stable_sort(proposals.begin(), proposals.end(),
                     [](const Proposal &a, const Proposal &b) {
                       return a.confidence > b.confidence;
                     });
    for (const auto &prop : proposals) {
      if (static_cast<int>(step.committed.size()) >= step.k) break;
      auto &span = spans[prop.span];
      if (overlaps_decoded(span)) continue;
      span.state = SpanState::kDecoded;
      span.entity = span.candidates[prop.entity].entity;
      span.confidence = prop.confidence;
      decoded.push_back({span.start, span.end, span.entity});
      step.committed.push_back(prop.span);
    }
    result.log.push_back(std::move(step));
  }

  for (auto &span : spans) {
    if (span.state == SpanState::kUndecided) span.state = SpanState::kRejected;
  }
  result.spans = std::move(spans);
  return result;
}

LinkerGradients LinkerLossAndGradients(
    const std::vector<TrainingExample> &examples, const LinkerParams &params,
    const EmbeddingSpace &entities) {
  const int d = params.head.dim();
  LinkerGradients total;
  total.head_a = Matrix::Zero(d, d);
  total.head_c = Vector::Zero(d);
  total.eps_embedding = Vector::Zero(d);
  if (examples.empty()) return total;

  for (const auto &ex : examples) {
    auto scored = ScoredCandidates(ex.candidates, entities, params.eps);
    int gold = static_cast<int>(ex.candidates.size());
    if (ex.gold) {
      auto it = std::find_if(ex.candidates.begin(), ex.candidates.end(),
                             [&](const Candidate &c) { return c.entity == *ex.gold; });
      if (it == ex.candidates.end()) {
        throw std::invalid_argument("gold " + *ex.gold + " is not a candidate");
      }
      gold = static_cast<int>(it - ex.candidates.begin());
    }
    auto grads = ComputeHeadGradients(ex.hidden, params.head, scored, gold);
    total.loss += grads.loss;
    total.head_a += grads.a;
    total.head_c += grads.c;
    total.eps_embedding += grads.embeddings.back();
    total.eps_bias += grads.biases.back();
  }
  const double scale = 1.0 / static_cast<double>(examples.size());
  total.loss *= scale;
  total.head_a *= scale;
  total.head_c *= scale;
  total.eps_embedding *= scale;
  total.eps_bias *= scale;
  return total;
}

TrainResult TrainLinker(const std::vector<TrainingExample> &examples,
                        LinkerParams params, const EmbeddingSpace &entities,
                        const TrainOptions &options) {
  TrainResult result;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    auto grads = LinkerLossAndGradients(examples, params, entities);
    result.losses.push_back(grads.loss);
    params.head.a -= options.step_size * grads.head_a;
    params.head.c -= options.step_size * grads.head_c;
    params.eps.embedding -= options.step_size * grads.eps_embedding;
    params.eps.bias -= options.step_size * grads.eps_bias;
  }
  result.losses.push_back(LinkerLossAndGradients(examples, params, entities).loss);
  result.params = std::move(params);
  return result;
}

void RedirectMap::Add(const std::string &from, const std::string &to) {
  redirects_[from] = to;
}

std::string RedirectMap::Canonical(const std::string &entity) const {
  std::string current = entity;
  for (int depth = 0; depth <= kMaxDepth; ++depth) {
    auto it = redirects_.find(current);
    if (it == redirects_.end()) return current;
    current = it->second;
  }
  throw DataError("cyclic redirect chain starting at " + entity);
}

void RedirectMap::Validate() const {
  for (const auto &[from, to] : redirects_) Canonical(from);
}

RedirectMap LoadRedirects(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  RedirectMap map;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != 2) {
      throw DataError(fmt::format("{}:{}: expected from<TAB>to", path.string(),
                                  line_number));
    }
    map.Add(NormalizeEntity(fields[0]), NormalizeEntity(fields[1]));
  }
  map.Validate();
  return map;
}

StrongMatchReport StrongMatchF1(
    const std::vector<std::vector<EntityAnnotation>> &predictions,
    const std::vector<std::vector<EntityAnnotation>> &golds,
    const RedirectMap &redirects) {
  if (predictions.size() != golds.size()) {
    throw std::invalid_argument("prediction and gold document counts differ");
  }
  using Key = std::tuple<int, int, std::string>;
  auto canonical_set = [&](const std::vector<EntityAnnotation> &items) {
    std::set<Key> keys;
    for (const auto &a : items) {
      keys.emplace(a.start, a.end, redirects.Canonical(a.entity));
    }
    return keys;
  };

  StrongMatchReport report;
  Prf macro_sum;
  for (size_t doc = 0; doc < golds.size(); ++doc) {
    auto pred_keys = canonical_set(predictions[doc]);
    auto gold_keys = canonical_set(golds[doc]);
    int tp = 0;
    for (const auto &key : pred_keys) tp += gold_keys.count(key);
    int np = static_cast<int>(pred_keys.size());
    int ng = static_cast<int>(gold_keys.size());
    Prf doc_prf = ScorePrf(tp, np, ng);
    macro_sum.precision += doc_prf.precision;
    macro_sum.recall += doc_prf.recall;
    macro_sum.f1 += doc_prf.f1;
    report.true_positives += tp;
    report.predictions += np;
    report.golds += ng;
  }
  report.micro = ScorePrf(report.true_positives, report.predictions, report.golds);
  if (!golds.empty()) {
    const double n = static_cast<double>(golds.size());
    report.macro = {macro_sum.precision / n, macro_sum.recall / n,
                    macro_sum.f1 / n};
  } else {
    report.macro = report.micro;
  }
  return report;
}

std::vector<ElDocument> ReadElDocuments(std::istream &in) {
  std::vector<ElDocument> docs;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json record = json::parse(line);
      ElDocument doc;
      doc.doc_id = record.value("doc_id", fmt::format("doc{}", docs.size()));
      doc.tokens = record.at("tokens").get<std::vector<std::string>>();
      const int n = static_cast<int>(doc.tokens.size());
      if (record.contains("golds")) {
        for (const auto &g : record["golds"]) {
          EntityAnnotation a{g.at("start").get<int>(), g.at("end").get<int>(),
                             NormalizeEntity(g.at("entity").get<std::string>())};
          if (a.start < 0 || a.start >= a.end || a.end > n) {
            throw DataError(fmt::format("gold [{}, {}) out of range", a.start,
                                        a.end));
          }
          doc.golds.push_back(std::move(a));
        }
      }
      std::sort(doc.golds.begin(), doc.golds.end(),
                [](const auto &a, const auto &b) {
                  return std::tie(a.start, a.end) < std::tie(b.start, b.end);
                });
      for (size_t i = 1; i < doc.golds.size(); ++i) {
        if (doc.golds[i].start < doc.golds[i - 1].end) {
          throw DataError("overlapping gold spans in " + doc.doc_id);
        }
      }
      if (record.contains("sentence_lengths")) {
        doc.sentence_lengths =
            record["sentence_lengths"].get<std::vector<int>>();
        long sum = 0;
        for (int len : doc.sentence_lengths) {
          if (len <= 0) throw DataError("sentence lengths must be positive");
          sum += len;
        }
        if (sum != n) {
          throw DataError("sentence lengths do not add up to the token count");
        }
      }
      docs.push_back(std::move(doc));
    } catch (const json::exception &e) {
      throw DataError(fmt::format("line {}: {}", line_number, e.what()));
    } catch (const DataError &e) {
      throw DataError(fmt::format("line {}: {}", line_number, e.what()));
    }
  }
  return docs;
}

std::vector<ElDocument> LoadElDocuments(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return ReadElDocuments(in);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<std::pair<int, int>> DocumentChunks(const ElDocument &doc,
                                                const Vocabulary &vocab,
                                                int chunk_limit) {
  std::vector<int> lengths = doc.sentence_lengths;
  if (lengths.empty() && !doc.tokens.empty()) {
    lengths.push_back(static_cast<int>(doc.tokens.size()));
  }
  std::vector<int> piece_counts;
  std::vector<int> offsets;  // token offset of each sentence
  int offset = 0;
  for (int len : lengths) {
    int pieces = 0;
    for (int i = offset; i < offset + len; ++i) {
      pieces += static_cast<int>(TokenizeWord(doc.tokens[i], vocab).size());
    }
    piece_counts.push_back(pieces);
    offsets.push_back(offset);
    offset += len;
  }
  offsets.push_back(offset);
  // [CLS], [E-MASK], "/", "*" and [SEP] come on top of the chunk text.
  std::vector<std::pair<int, int>> ranges;
  for (const auto &chunk : ChunkDocument(piece_counts, chunk_limit - 5)) {
    ranges.emplace_back(offsets[chunk.begin], offsets[chunk.end]);
  }
  return ranges;
}

DocumentLinks LinkDocument(const ElDocument &doc, const CandidateTable &table,
                           const SpanScorer &scorer, const Vocabulary &vocab,
                           const LinkOptions &options) {
  DocumentLinks links;
  for (auto [begin, end] : DocumentChunks(doc, vocab, options.chunk_limit)) {
    std::vector<std::string> tokens(doc.tokens.begin() + begin,
                                    doc.tokens.begin() + end);
    auto spans = GenerateCandidates(tokens, table, options.max_span);
    auto refined = IterativeRefine(tokens, std::move(spans), scorer,
                                   options.iterations, options.threads);
    for (auto &step : refined.log) links.log.push_back(std::move(step));
    for (auto &span : refined.spans) {
      span.start += begin;
      span.end += begin;
      if (span.state == SpanState::kDecoded) {
        links.predictions.push_back({span.start, span.end, span.entity});
      }
      links.spans.push_back(std::move(span));
    }
  }
  return links;
}

TrainingSet BuildTrainingSet(const std::vector<ElDocument> &docs,
                             const CandidateTable &table,
                             const MlmSpanScorer &scorer,
                             const Vocabulary &vocab,
                             const RedirectMap &redirects,
                             const LinkOptions &options) {
  TrainingSet set;
  for (const auto &doc : docs) {
    for (auto [begin, end] : DocumentChunks(doc, vocab, options.chunk_limit)) {
      std::vector<std::string> tokens(doc.tokens.begin() + begin,
                                      doc.tokens.begin() + end);
      for (const auto &span : GenerateCandidates(tokens, table, options.max_span)) {
        TrainingExample ex;
        ex.candidates = span.candidates;
        auto gold = std::find_if(doc.golds.begin(), doc.golds.end(),
                                 [&](const EntityAnnotation &g) {
                                   return g.start == span.start + begin &&
                                          g.end == span.end + begin;
                                 });
        if (gold != doc.golds.end()) {
          std::string canonical = redirects.Canonical(gold->entity);
          auto match = std::find_if(
              span.candidates.begin(), span.candidates.end(),
              [&](const Candidate &c) {
                return redirects.Canonical(c.entity) == canonical;
              });
          if (match == span.candidates.end()) {
            ++set.dropped;
            continue;
          }
          ex.gold = match->entity;
        }
        ex.hidden = scorer.Hidden(tokens, span, {});
        set.examples.push_back(std::move(ex));
      }
    }
  }
  return set;
}

}  // namespace ebert

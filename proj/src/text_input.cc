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

#include "ebert/text_input.h"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "ebert/error.h"

namespace ebert {
namespace {

// Words longer than this become [UNK], as in the reference BERT tokenizer.
constexpr size_t kMaxWordChars = 100;

bool IsAsciiPunct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) ||
         (c >= 91 && c <= 96) || (c >= 123 && c <= 126);
}

// Length of a bracketed special token such as "[MASK]" at the start of
// `text`, or 0.
size_t SpecialTokenLength(std::string_view text) {
  if (text.empty() || text[0] != '[') return 0;
  size_t i = 1;
  while (i < text.size() && ((text[i] >= 'A' && text[i] <= 'Z') ||
                             text[i] == '-' || text[i] == '_')) {
    ++i;
  }
  if (i > 1 && i < text.size() && text[i] == ']') return i + 1;
  return 0;
}

// Splits one whitespace word into units: runs of non-punctuation, single
// punctuation characters and whole special tokens.
std::vector<std::string_view> SplitPunctuation(std::string_view word) {
  std::vector<std::string_view> units;
  size_t start = 0;
  size_t i = 0;
  auto flush = [&](size_t end) {
    if (end > start) units.push_back(word.substr(start, end - start));
  };
  while (i < word.size()) {
    if (size_t len = SpecialTokenLength(word.substr(i)); len > 0) {
      flush(i);
      units.push_back(word.substr(i, len));
      i += len;
      start = i;
    } else if (IsAsciiPunct(static_cast<unsigned char>(word[i]))) {
      flush(i);
      units.push_back(word.substr(i, 1));
      ++i;
      start = i;
    } else {
      ++i;
    }
  }
  flush(i);
  return units;
}

// Byte offsets of UTF-8 code point starts, plus the end offset.
std::vector<size_t> CodePointBoundaries(std::string_view text) {
  std::vector<size_t> bounds;
  for (size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      bounds.push_back(i);
    }
  }
  bounds.push_back(text.size());
  return bounds;
}

void GreedyLongestMatch(std::string_view unit, const Vocabulary &vocab,
                        std::vector<std::string> *out) {
  auto bounds = CodePointBoundaries(unit);
  if (bounds.size() - 1 > kMaxWordChars) {
    out->emplace_back(kUnkPiece);
    return;
  }
  std::vector<std::string> pieces;
  size_t begin = 0;
  while (begin + 1 < bounds.size()) {
    std::string match;
    size_t match_end = 0;
    for (size_t end = bounds.size() - 1; end > begin; --end) {
      std::string candidate(unit.substr(bounds[begin],
                                        bounds[end] - bounds[begin]));
      if (begin > 0) candidate.insert(0, "##");
      if (vocab.Contains(candidate)) {
        match = std::move(candidate);
        match_end = end;
        break;
      }
    }
    if (match_end == 0) {
      out->emplace_back(kUnkPiece);
      return;
    }
    pieces.push_back(std::move(match));
    begin = match_end;
  }
  for (auto &piece : pieces) out->push_back(std::move(piece));
}

void CheckSpan(const MentionSpan &span, int num_words) {
  if (span.start < 0 || span.start >= span.end || span.end > num_words) {
    throw std::invalid_argument(fmt::format(
        "mention [{}, {}) out of range for {} words", span.start, span.end,
        num_words));
  }
}

struct MarkedMention {
  const MentionSpan *span;
  std::optional<ControlKind> marker;
};

TokenSequence Assemble(const std::vector<std::string> &words,
                       std::vector<MarkedMention> mentions, InputMode mode,
                       const EmbeddingSpace *entities,
                       const Vocabulary &vocab) {
  const int num_words = static_cast<int>(words.size());
  for (const auto &m : mentions) CheckSpan(*m.span, num_words);
  std::sort(mentions.begin(), mentions.end(),
            [](const MarkedMention &a, const MarkedMention &b) {
              return a.span->start < b.span->start;
            });
  for (size_t i = 1; i < mentions.size(); ++i) {
    if (mentions[i].span->start < mentions[i - 1].span->end) {
      throw std::invalid_argument(fmt::format(
          "overlapping mentions [{}, {}) and [{}, {})",
          mentions[i - 1].span->start, mentions[i - 1].span->end,
          mentions[i].span->start, mentions[i].span->end));
    }
  }

  TokenSequence seq;
  seq.tokens.push_back(Control(ControlKind::kCls));
  auto append_word = [&](int w) {
    for (const auto &piece : TokenizeWord(words[w], vocab)) {
      seq.tokens.push_back(PieceToToken(piece));
    }
  };
  size_t next = 0;
  for (int w = 0; w < num_words;) {
    if (next < mentions.size() && mentions[next].span->start == w) {
      const MentionSpan &span = *mentions[next].span;
      auto marker = mentions[next].marker;
      bool resolvable = mode != InputMode::kBert && span.entity.has_value() &&
                        entities != nullptr &&
                        entities->vocab().Contains(*span.entity);
      if (marker) seq.tokens.push_back(Control(*marker));
      if (resolvable) seq.tokens.push_back(Entity(*span.entity));
      if (!resolvable || mode == InputMode::kConcat) {
        if (resolvable) seq.tokens.push_back(Control(ControlKind::kSlash));
        for (int i = span.start; i < span.end; ++i) append_word(i);
      }
      if (marker) seq.tokens.push_back(Control(*marker));
      w = span.end;
      ++next;
    } else {
      append_word(w);
      ++w;
    }
  }
  seq.tokens.push_back(Control(ControlKind::kSep));
  return seq;
}

void SplitRange(const std::vector<int> &sizes, size_t begin, size_t end,
                int limit, std::vector<Chunk> *chunks) {
  long total = 0;
  for (size_t i = begin; i < end; ++i) total += sizes[i];
  if (total <= limit || end - begin <= 1) {
    chunks->push_back({begin, end});
    return;
  }
  // Boundary b splits [begin, b) | [b, end); pick the smallest
  // |2 * left - total|, leftmost on ties.
  size_t best = begin + 1;
  long best_distance = -1;
  long left = 0;
  for (size_t b = begin + 1; b < end; ++b) {
    left += sizes[b - 1];
    long distance = std::labs(2 * left - total);
    if (best_distance < 0 || distance < best_distance) {
      best_distance = distance;
      best = b;
    }
  }
  SplitRange(sizes, begin, best, limit, chunks);
  SplitRange(sizes, best, end, limit, chunks);
}

}  // namespace

std::string_view ControlPiece(ControlKind kind) {
  switch (kind) {
    case ControlKind::kCls: return "[CLS]";
    case ControlKind::kSep: return "[SEP]";
    case ControlKind::kUnk: return kUnkPiece;
    case ControlKind::kSlash: return "/";
    case ControlKind::kHash: return "#";
    case ControlKind::kDollar: return "$";
    case ControlKind::kStar: return "*";
  }
  return kUnkPiece;
}

Token PieceToToken(const std::string &piece) {
  if (piece == kUnkPiece) return Control(ControlKind::kUnk);
  if (piece == kMaskPiece) return MaskToken{};
  return Piece(piece);
}

std::string TokenToString(const Token &token) {
  struct Visitor {
    std::string operator()(const WordpieceToken &t) const { return t.piece; }
    std::string operator()(const EntityToken &t) const { return t.id; }
    std::string operator()(const MaskToken &) const {
      return std::string(kMaskPiece);
    }
    std::string operator()(const EntityMaskToken &t) const {
      std::string out = "[E-MASK:";
      for (size_t i = 0; i < t.candidates.size(); ++i) {
        if (i > 0) out += '|';
        out += t.candidates[i];
      }
      return out + "]";
    }
    std::string operator()(const ControlToken &t) const {
      return std::string(ControlPiece(t.kind));
    }
  };
  return std::visit(Visitor{}, token);
}

std::string ToString(const TokenSequence &sequence) {
  std::string out;
  for (const auto &token : sequence.tokens) {
    if (!out.empty()) out += ' ';
    out += TokenToString(token);
  }
  return out;
}

int CountMasks(const TokenSequence &sequence) {
  return static_cast<int>(std::count_if(
      sequence.tokens.begin(), sequence.tokens.end(), [](const Token &t) {
        return std::holds_alternative<MaskToken>(t) ||
               std::holds_alternative<EntityMaskToken>(t);
      }));
}

size_t MaskPosition(const TokenSequence &sequence) {
  int count = CountMasks(sequence);
  if (count != 1) {
    throw std::invalid_argument(
        fmt::format("expected exactly one mask, found {}", count));
  }
  for (size_t i = 0; i < sequence.size(); ++i) {
    if (std::holds_alternative<MaskToken>(sequence.tokens[i]) ||
        std::holds_alternative<EntityMaskToken>(sequence.tokens[i])) {
      return i;
    }
  }
  return 0;
}

InputMode ParseInputMode(std::string_view name) {
  if (name == "bert") return InputMode::kBert;
  if (name == "concat") return InputMode::kConcat;
  if (name == "replace") return InputMode::kReplace;
  throw std::invalid_argument("unknown input mode: " + std::string(name));
}

std::string_view InputModeName(InputMode mode) {
  switch (mode) {
    case InputMode::kBert: return "bert";
    case InputMode::kConcat: return "concat";
    case InputMode::kReplace: return "replace";
  }
  return "bert";
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

std::vector<std::string> TokenizeWord(std::string_view word,
                                      const Vocabulary &vocab) {
  std::vector<std::string> pieces;
  for (std::string_view unit : SplitPunctuation(word)) {
    if (SpecialTokenLength(unit) == unit.size() && unit.size() > 0) {
      pieces.emplace_back(unit);
    } else {
      GreedyLongestMatch(unit, vocab, &pieces);
    }
  }
  return pieces;
}

std::vector<std::string> WordpieceTokenize(std::string_view text,
                                           const Vocabulary &vocab) {
  std::vector<std::string> pieces;
  for (const auto &word : SplitWhitespace(text)) {
    auto word_pieces = TokenizeWord(word, vocab);
    pieces.insert(pieces.end(), std::make_move_iterator(word_pieces.begin()),
                  std::make_move_iterator(word_pieces.end()));
  }
  return pieces;
}

TokenSequence BuildInput(std::string_view sentence,
                         const std::vector<MentionSpan> &mentions,
                         InputMode mode, const EmbeddingSpace *entities,
                         const Vocabulary &vocab) {
  std::vector<MarkedMention> marked;
  marked.reserve(mentions.size());
  for (const auto &m : mentions) marked.push_back({&m, std::nullopt});
  return Assemble(SplitWhitespace(sentence), std::move(marked), mode,
                  entities, vocab);
}

TokenSequence BuildRcInput(std::string_view sentence,
                           const MentionSpan &subject,
                           const MentionSpan &object, InputMode mode,
                           const EmbeddingSpace *entities,
                           const Vocabulary &vocab) {
  return Assemble(SplitWhitespace(sentence),
                  {{&subject, ControlKind::kHash},
                   {&object, ControlKind::kDollar}},
                  mode, entities, vocab);
}

std::vector<Chunk> ChunkDocument(const std::vector<int> &sentence_sizes,
                                 int limit) {
  for (size_t i = 0; i < sentence_sizes.size(); ++i) {
    if (sentence_sizes[i] > limit) {
      throw DataError(fmt::format(
          "sentence {} has {} wordpieces, more than the limit of {}", i,
          sentence_sizes[i], limit));
    }
  }
  std::vector<Chunk> chunks;
  if (sentence_sizes.empty()) return chunks;
  SplitRange(sentence_sizes, 0, sentence_sizes.size(), limit, &chunks);
  return chunks;
}

}  // namespace ebert

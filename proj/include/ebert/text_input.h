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

// Tokenization and construction of model inputs.
//
// A sentence is whitespace-tokenized into words; mention spans index those
// words. Each word is split into wordpieces with greedy longest-match-first
// search. Entity-enhanced inputs either put the entity in front of the
// mention ("concat": Jean_Marais / Jean Mara ##is) or substitute it
// ("replace": Jean_Marais).

#ifndef EBERT_TEXT_INPUT_H_
#define EBERT_TEXT_INPUT_H_

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ebert/embeddings.h"

namespace ebert {

inline constexpr std::string_view kUnkPiece = "[UNK]";
inline constexpr std::string_view kMaskPiece = "[MASK]";

enum class ControlKind { kCls, kSep, kUnk, kSlash, kHash, kDollar, kStar };

// Wordpiece that a control token is embedded as.
std::string_view ControlPiece(ControlKind kind);

struct WordpieceToken {
  std::string piece;
  bool operator==(const WordpieceToken &) const = default;
};

struct EntityToken {
  std::string id;
  bool operator==(const EntityToken &) const = default;
};

struct MaskToken {
  bool operator==(const MaskToken &) const = default;
};

// Mask embedded as the mean of its candidates' entity vectors.
struct EntityMaskToken {
  std::vector<std::string> candidates;
  bool operator==(const EntityMaskToken &) const = default;
};

struct ControlToken {
  ControlKind kind;
  bool operator==(const ControlToken &) const = default;
};

using Token = std::variant<WordpieceToken, EntityToken, MaskToken,
                           EntityMaskToken, ControlToken>;

// Convenience constructors for readable tests and builders.
inline Token Piece(std::string piece) {
  return WordpieceToken{std::move(piece)};
}
inline Token Entity(std::string id) { return EntityToken{std::move(id)}; }
inline Token Control(ControlKind kind) { return ControlToken{kind}; }

// Maps a tokenizer output string to a token: "[UNK]" and "[MASK]" become
// their special tokens, everything else a wordpiece.
Token PieceToToken(const std::string &piece);

std::string TokenToString(const Token &token);

struct TokenSequence {
  std::vector<Token> tokens;

  size_t size() const { return tokens.size(); }
  bool operator==(const TokenSequence &) const = default;
};

// Renders tokens separated by spaces, for logs and tests.
std::string ToString(const TokenSequence &sequence);

// Number of Mask plus EntityMask tokens.
int CountMasks(const TokenSequence &sequence);
// Position of the single Mask or EntityMask token; throws
// std::invalid_argument unless there is exactly one.
size_t MaskPosition(const TokenSequence &sequence);

struct MentionSpan {
  int start = 0;
  int end = 0;  // exclusive
  std::string surface;
  std::optional<std::string> entity;
};

enum class InputMode { kBert, kConcat, kReplace };

InputMode ParseInputMode(std::string_view name);
std::string_view InputModeName(InputMode mode);

std::vector<std::string> SplitWhitespace(std::string_view text);

// Greedy longest-match-first wordpiece segmentation. Text is split on
// whitespace, ASCII punctuation is split off as separate words (bracketed
// special tokens such as [MASK] stay whole), and a word without a full
// decomposition becomes a single "[UNK]".
std::vector<std::string> WordpieceTokenize(std::string_view text,
                                           const Vocabulary &vocab);

// Wordpieces of a single whitespace-delimited word.
std::vector<std::string> TokenizeWord(std::string_view word,
                                      const Vocabulary &vocab);

// [CLS] sentence [SEP] with mentions entity-injected per `mode`. A mention
// whose entity is missing from `entities` (or when `entities` is null) is
// left as plain wordpieces. Throws std::invalid_argument for overlapping or
// out-of-range mentions.
TokenSequence BuildInput(std::string_view sentence,
                         const std::vector<MentionSpan> &mentions,
                         InputMode mode, const EmbeddingSpace *entities,
                         const Vocabulary &vocab);

// Relation classification input: subject wrapped in "#" markers, object in
// "$" markers, each entity-injected per `mode`.
TokenSequence BuildRcInput(std::string_view sentence,
                           const MentionSpan &subject,
                           const MentionSpan &object, InputMode mode,
                           const EmbeddingSpace *entities,
                           const Vocabulary &vocab);

// Half-open range of sentence indices.
struct Chunk {
  size_t begin = 0;
  size_t end = 0;
  bool operator==(const Chunk &) const = default;
};

// Recursively splits a document at the sentence boundary closest to its
// midpoint until every chunk holds at most `limit` wordpieces. Ties go to
// the leftmost boundary. Throws DataError if one sentence exceeds `limit`.
std::vector<Chunk> ChunkDocument(const std::vector<int> &sentence_sizes,
                                 int limit = 512);

}  // namespace ebert

#endif  // EBERT_TEXT_INPUT_H_

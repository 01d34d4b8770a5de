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

// Vocabularies and dense embedding spaces stored in the word2vec text
// format:
//
//   <count> <dim>
//   <symbol> <v1> ... <v_dim>
//
// Entity symbols carry the "ENTITY/" prefix (e.g. "ENTITY/Jean_Marais") and
// share one file with ordinary words.

#ifndef EBERT_EMBEDDINGS_H_
#define EBERT_EMBEDDINGS_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace ebert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using FloatRows =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::string_view kEntityPrefix = "ENTITY/";

enum class SymbolClass { kWord, kEntity, kWordpiece };

enum class SpaceKind { kWordpiece, kWordAndEntity };

inline bool IsEntitySymbol(std::string_view symbol) {
  return symbol.size() > kEntityPrefix.size() &&
         symbol.substr(0, kEntityPrefix.size()) == kEntityPrefix;
}

// Ordered set of unique symbols with dense ids starting at 0.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Throws DataError on duplicates.
  explicit Vocabulary(std::vector<std::string> symbols);

  // Appends a symbol and returns its id. Throws DataError if present.
  int Add(std::string symbol);

  std::optional<int> Find(const std::string &symbol) const;
  bool Contains(const std::string &symbol) const {
    return index_.count(symbol) != 0;
  }

  const std::string &Symbol(int id) const { return symbols_.at(id); }
  const std::vector<std::string> &symbols() const { return symbols_; }
  int size() const { return static_cast<int>(symbols_.size()); }
  bool empty() const { return symbols_.empty(); }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

// A vocabulary plus one row vector per symbol. Immutable once built, so a
// const space can be shared by concurrent readers.
class EmbeddingSpace {
 public:
  // Validates that the row count matches the vocabulary and that every
  // value is finite; throws DataError otherwise.
  EmbeddingSpace(Vocabulary vocab, FloatRows matrix, SpaceKind kind);

  const Vocabulary &vocab() const { return vocab_; }
  const FloatRows &matrix() const { return matrix_; }
  SpaceKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(matrix_.cols()); }
  int size() const { return vocab_.size(); }

  SymbolClass Classify(int id) const;

  // Row for `symbol` widened to double, or nullopt if unknown.
  std::optional<Vector> Lookup(const std::string &symbol) const;
  Vector Row(int id) const { return matrix_.row(id).cast<double>(); }

  int EntityCount() const { return entity_count_; }
  int WordCount() const { return size() - entity_count_; }

 private:
  Vocabulary vocab_;
  FloatRows matrix_;
  SpaceKind kind_;
  int entity_count_ = 0;
};

EmbeddingSpace ReadSpace(std::istream &in, SpaceKind kind);
EmbeddingSpace LoadSpace(const std::filesystem::path &path, SpaceKind kind);

// Writes the shortest decimal form that reproduces each float exactly.
void WriteSpace(const EmbeddingSpace &space, std::ostream &out);
void SaveSpace(const EmbeddingSpace &space, const std::filesystem::path &path);

struct SharedSymbol {
  std::string symbol;
  int wordpiece_id;
  int wiki_id;
};

// Exact case-sensitive intersection of the wordpiece vocabulary with the
// non-entity symbols of the Wikipedia space, in ascending wordpiece id
// order. Throws DataError if the intersection is empty.
std::vector<SharedSymbol> SharedVocabulary(const EmbeddingSpace &wordpieces,
                                           const EmbeddingSpace &wiki);

// Formats a value with the shortest round-trip representation.
std::string FormatFloat(float value);
std::string FormatDouble(double value);

}  // namespace ebert

#endif  // EBERT_EMBEDDINGS_H_

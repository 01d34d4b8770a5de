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

#include "ebert/embeddings.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/core.h>

#include "ebert/error.h"

namespace ebert {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

bool ParseDouble(std::string_view text, double *value) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   *value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool ParseInt(std::string_view text, long *value) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   *value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> symbols) {
  symbols_.reserve(symbols.size());
  for (auto &symbol : symbols) Add(std::move(symbol));
}

int Vocabulary::Add(std::string symbol) {
  int id = size();
  auto [it, inserted] = index_.emplace(symbol, id);
  if (!inserted) throw DataError("duplicate symbol: " + symbol);
  symbols_.push_back(std::move(symbol));
  return id;
}

std::optional<int> Vocabulary::Find(const std::string &symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingSpace::EmbeddingSpace(Vocabulary vocab, FloatRows matrix,
                               SpaceKind kind)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)), kind_(kind) {
  if (matrix_.rows() != vocab_.size()) {
    throw DataError(fmt::format("matrix has {} rows for {} symbols",
                                matrix_.rows(), vocab_.size()));
  }
  if (matrix_.cols() <= 0) throw DataError("embedding dimension must be > 0");
  if (!matrix_.allFinite()) throw DataError("embedding matrix is not finite");
  if (kind_ == SpaceKind::kWordAndEntity) {
    for (const auto &symbol : vocab_.symbols()) {
      if (IsEntitySymbol(symbol)) ++entity_count_;
    }
  }
}

SymbolClass EmbeddingSpace::Classify(int id) const {
  if (kind_ == SpaceKind::kWordpiece) return SymbolClass::kWordpiece;
  return IsEntitySymbol(vocab_.Symbol(id)) ? SymbolClass::kEntity
                                           : SymbolClass::kWord;
}

std::optional<Vector> EmbeddingSpace::Lookup(const std::string &symbol) const {
  auto id = vocab_.Find(symbol);
  if (!id) return std::nullopt;
  return Row(*id);
}

EmbeddingSpace ReadSpace(std::istream &in, SpaceKind kind) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header line");
  auto header = SplitFields(line);
  long count = 0, dim = 0;
  if (header.size() != 2 || !ParseInt(header[0], &count) ||
      !ParseInt(header[1], &dim) || count < 0 || dim <= 0) {
    throw DataError("malformed header: '" + line + "'");
  }

  Vocabulary vocab;
  FloatRows matrix(count, dim);
  long row = 0;
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (row >= count) {
      throw DataError(fmt::format(
          "count mismatch: header declares {} rows, extra data on line {}",
          count, line_number));
    }
    if (static_cast<long>(fields.size()) != dim + 1) {
      throw DataError(fmt::format(
          "dimension mismatch on line {}: expected {} values, got {}",
          line_number, dim, fields.size() - 1));
    }
    for (long j = 0; j < dim; ++j) {
      double value;
      if (!ParseDouble(fields[j + 1], &value)) {
        throw DataError(fmt::format("bad number '{}' on line {}",
                                    fields[j + 1], line_number));
      }
      matrix(row, j) = static_cast<float>(value);
    }
    try {
      vocab.Add(std::string(fields[0]));
    } catch (const DataError &e) {
      throw DataError(fmt::format("{} (line {})", e.what(), line_number));
    }
    ++row;
  }
  if (row != count) {
    throw DataError(fmt::format(
        "count mismatch: header declares {} rows, file has {}", count, row));
  }
  return EmbeddingSpace(std::move(vocab), std::move(matrix), kind);
}

EmbeddingSpace LoadSpace(const std::filesystem::path &path, SpaceKind kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return ReadSpace(in, kind);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string FormatFloat(float value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void WriteSpace(const EmbeddingSpace &space, std::ostream &out) {
  out << space.size() << ' ' << space.dim() << '\n';
  const auto &matrix = space.matrix();
  for (int i = 0; i < space.size(); ++i) {
    out << space.vocab().Symbol(i);
    for (int j = 0; j < space.dim(); ++j) {
      out << ' ' << FormatFloat(matrix(i, j));
    }
    out << '\n';
  }
}

void SaveSpace(const EmbeddingSpace &space,
               const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  WriteSpace(space, out);
}

std::vector<SharedSymbol> SharedVocabulary(const EmbeddingSpace &wordpieces,
                                           const EmbeddingSpace &wiki) {
  if (wordpieces.kind() != SpaceKind::kWordpiece ||
      wiki.kind() != SpaceKind::kWordAndEntity) {
    throw std::invalid_argument(
        "shared vocabulary needs a wordpiece space and a word/entity space");
  }
  std::vector<SharedSymbol> shared;
  const auto &symbols = wordpieces.vocab().symbols();
  for (int id = 0; id < static_cast<int>(symbols.size()); ++id) {
    if (IsEntitySymbol(symbols[id])) continue;
    if (auto wiki_id = wiki.vocab().Find(symbols[id])) {
      shared.push_back({symbols[id], id, *wiki_id});
    }
  }
  if (shared.empty()) {
    throw DataError("empty intersection between wordpiece and word vocabularies");
  }
  return shared;
}

}  // namespace ebert

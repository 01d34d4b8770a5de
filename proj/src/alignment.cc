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

#include "ebert/alignment.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "ebert/error.h"

namespace ebert {

AlignmentMap FitLinearMap(const Matrix &source, const Matrix &target) {
  if (source.cols() == 0) throw DataError("cannot fit alignment on 0 pairs");
  if (source.cols() != target.cols()) {
    throw std::invalid_argument("source and target pair counts differ");
  }
  // Rows of the design matrix are source vectors; solve design * W^T = Y^T.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(source.transpose());
  AlignmentMap map;
  map.weights = cod.solve(target.transpose()).transpose();
  map.shared_count = static_cast<int>(source.cols());
  map.rank_deficient = cod.rank() < source.rows();
  map.residual = AlignmentObjective(map.weights, source, target);
  return map;
}

double AlignmentObjective(const Matrix &weights, const Matrix &source,
                          const Matrix &target) {
  return (weights * source - target).squaredNorm();
}

std::pair<Matrix, Matrix> GatherPairs(const EmbeddingSpace &src,
                                      const EmbeddingSpace &tgt,
                                      const std::vector<SharedSymbol> &pairs,
                                      const AlignmentOptions &options) {
  Matrix source(src.dim(), pairs.size());
  Matrix target(tgt.dim(), pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    source.col(i) = src.Row(pairs[i].wiki_id);
    target.col(i) = tgt.Row(pairs[i].wordpiece_id);
    if (options.l2_normalize) {
      if (source.col(i).norm() > 0) source.col(i).normalize();
      if (target.col(i).norm() > 0) target.col(i).normalize();
    }
  }
  return {std::move(source), std::move(target)};
}

AlignmentMap FitAlignment(const EmbeddingSpace &src, const EmbeddingSpace &tgt,
                          const std::vector<SharedSymbol> &pairs,
                          const AlignmentOptions &options) {
  if (pairs.empty()) throw DataError("cannot fit alignment on 0 pairs");
  auto [source, target] = GatherPairs(src, tgt, pairs, options);
  return FitLinearMap(source, target);
}

Vector ApplyAlignment(const AlignmentMap &map, const Vector &v) {
  if (v.size() != map.source_dim()) {
    throw std::invalid_argument(fmt::format(
        "vector has dimension {}, alignment expects {}", v.size(),
        map.source_dim()));
  }
  return map.weights * v;
}

EmbeddingSpace DeriveEntitySpace(const AlignmentMap &map,
                                 const EmbeddingSpace &wiki) {
  if (wiki.kind() != SpaceKind::kWordAndEntity) {
    throw std::invalid_argument("entity space must come from a word/entity space");
  }
  Vocabulary vocab;
  FloatRows rows(wiki.EntityCount(), map.target_dim());
  for (int id = 0; id < wiki.size(); ++id) {
    if (wiki.Classify(id) != SymbolClass::kEntity) continue;
    int row = vocab.Add(wiki.vocab().Symbol(id));
    rows.row(row) = ApplyAlignment(map, wiki.Row(id)).cast<float>().transpose();
  }
  return EmbeddingSpace(std::move(vocab), std::move(rows),
                        SpaceKind::kWordAndEntity);
}

void WriteAlignment(const AlignmentMap &map, std::ostream &out) {
  out << map.target_dim() << ' ' << map.source_dim() << ' '
      << FormatDouble(map.residual) << ' ' << map.shared_count << '\n';
  for (int i = 0; i < map.target_dim(); ++i) {
    for (int j = 0; j < map.source_dim(); ++j) {
      if (j > 0) out << ' ';
      out << FormatDouble(map.weights(i, j));
    }
    out << '\n';
  }
}

void SaveAlignment(const AlignmentMap &map,
                   const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  WriteAlignment(map, out);
}

AlignmentMap ReadAlignment(std::istream &in) {
  AlignmentMap map;
  long rows = 0, cols = 0;
  std::string header;
  if (!std::getline(in, header)) throw DataError("missing alignment header");
  std::istringstream header_in(header);
  std::string residual;
  if (!(header_in >> rows >> cols >> residual >> map.shared_count) ||
      rows <= 0 || cols <= 0) {
    throw DataError("malformed alignment header: '" + header + "'");
  }
  auto [ptr, ec] = std::from_chars(residual.data(),
                                   residual.data() + residual.size(),
                                   map.residual);
  if (ec != std::errc() || ptr != residual.data() + residual.size()) {
    throw DataError("malformed alignment residual: '" + residual + "'");
  }
  map.weights.resize(rows, cols);
  std::string token;
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(in >> token)) {
        throw DataError(fmt::format("alignment truncated at row {}", i + 1));
      }
      double value;
      auto [p, e] = std::from_chars(token.data(), token.data() + token.size(),
                                    value);
      if (e != std::errc() || p != token.data() + token.size()) {
        throw DataError("bad alignment value '" + token + "'");
      }
      map.weights(i, j) = value;
    }
  }
  if (in >> token) throw DataError("trailing data after alignment matrix");
  if (!map.weights.allFinite()) throw DataError("alignment is not finite");
  return map;
}

AlignmentMap LoadAlignment(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadAlignment(in);
}

}  // namespace ebert

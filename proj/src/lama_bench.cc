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

#include "ebert/lama_bench.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/core.h>
#include <json.hpp>

#include "ebert/error.h"
#include "ebert/parallel.h"

namespace ebert {
namespace {

using json = nlohmann::json;

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  for (auto &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

size_t CountOccurrences(std::string_view text, std::string_view needle) {
  size_t count = 0;
  for (size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string StripRelationPrefix(std::string_view relation) {
  if (auto colon = relation.find(':'); colon != std::string_view::npos) {
    return std::string(relation.substr(colon + 1));
  }
  return std::string(relation);
}

}  // namespace

NameNoun ParseNameNoun(std::string_view name) {
  if (name == "language") return NameNoun::kLanguage;
  if (name == "city") return NameNoun::kCity;
  if (name == "country") return NameNoun::kCountry;
  if (name == "none" || name.empty()) return NameNoun::kNone;
  throw std::invalid_argument("unknown name noun: " + std::string(name));
}

std::string_view NameNounWord(NameNoun noun) {
  switch (noun) {
    case NameNoun::kLanguage: return "language";
    case NameNoun::kCity: return "city";
    case NameNoun::kCountry: return "country";
    case NameNoun::kNone: return "none";
  }
  return "none";
}

NameNoun DefaultNameNoun(std::string_view relation) {
  std::string id = StripRelationPrefix(relation);
  if (id == "P103" || id == "P1412") return NameNoun::kLanguage;
  if (id == "P27") return NameNoun::kCountry;
  if (id == "P19" || id == "P20" || id == "place_of_birth" ||
      id == "place_of_death") {
    return NameNoun::kCity;
  }
  return NameNoun::kNone;
}

RelationTemplate MakeTemplate(std::string relation, std::string text,
                              NameNoun name_noun) {
  if (CountOccurrences(text, "[MASK]") == 0) {
    if (auto pos = text.find("[Y]"); pos != std::string::npos) {
      text.replace(pos, 3, "[MASK]");
    }
  }
  if (CountOccurrences(text, "[X]") != 1 ||
      CountOccurrences(text, "[MASK]") != 1) {
    throw std::invalid_argument(
        "template must contain [X] and [MASK] exactly once: '" + text + "'");
  }
  return {std::move(relation), std::move(text), name_noun};
}

TokenSequence RenderQuestion(const KbTriple &triple,
                             const RelationTemplate &tmpl, InputMode mode,
                             const EmbeddingSpace *entities,
                             const Vocabulary &vocab) {
  auto pos = tmpl.text.find("[X]");
  if (pos == std::string::npos || tmpl.text.find("[MASK]") == std::string::npos) {
    throw std::invalid_argument("template is missing a placeholder: '" +
                                tmpl.text + "'");
  }
  auto before = SplitWhitespace(std::string_view(tmpl.text).substr(0, pos));
  auto after = SplitWhitespace(std::string_view(tmpl.text).substr(pos + 3));
  auto subject = SplitWhitespace(triple.sub_surface);

  std::vector<std::string> words = before;
  MentionSpan mention;
  mention.start = static_cast<int>(words.size());
  words.insert(words.end(), subject.begin(), subject.end());
  mention.end = static_cast<int>(words.size());
  mention.surface = triple.sub_surface;
  mention.entity = triple.sub_entity;
  words.insert(words.end(), after.begin(), after.end());

  std::string sentence;
  for (const auto &w : words) {
    if (!sentence.empty()) sentence += ' ';
    sentence += w;
  }
  std::vector<MentionSpan> mentions;
  if (mention.end > mention.start) mentions.push_back(std::move(mention));
  return BuildInput(sentence, mentions, mode, entities, vocab);
}

RankedAnswers AnswerQuestion(const TokenSequence &sequence,
                             const ClozeScorer &scorer,
                             const Vocabulary &answers) {
  MaskPosition(sequence);  // throws unless exactly one mask
  if (answers.empty()) throw std::invalid_argument("empty answer vocabulary");
  auto logits = scorer.AnswerLogits(sequence, answers);
  if (static_cast<int>(logits.size()) != answers.size()) {
    throw std::logic_error("scorer returned the wrong number of logits");
  }
  auto probs = Softmax(logits);
  std::vector<int> order(probs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return probs[a] > probs[b]; });
  RankedAnswers ranking;
  ranking.reserve(order.size());
  for (int id : order) ranking.push_back({answers.Symbol(id), probs[id]});
  return ranking;
}

HitsReport HitsAtK(
    const std::map<std::string, std::vector<QuestionResult>> &by_relation,
    int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  HitsReport report;
  if (by_relation.empty()) throw std::invalid_argument("no relations to score");
  double sum = 0.0;
  for (const auto &[relation, questions] : by_relation) {
    if (questions.empty()) {
      throw std::invalid_argument("relation " + relation + " has no questions");
    }
    int hits = 0;
    for (const auto &q : questions) {
      size_t top = std::min<size_t>(k, q.ranking.size());
      for (size_t i = 0; i < top; ++i) {
        if (q.ranking[i].symbol == q.gold) {
          ++hits;
          break;
        }
      }
    }
    double mean = static_cast<double>(hits) / questions.size();
    report.per_relation[relation] = mean;
    report.counts[relation] = static_cast<int>(questions.size());
    sum += mean;
  }
  report.overall = sum / by_relation.size();
  return report;
}

FilterVerdict StringMatchFilter(const KbTriple &triple) {
  std::string sub = AsciiLower(triple.sub_surface);
  std::string obj = AsciiLower(triple.obj_surface);
  return sub.find(obj) != std::string::npos ? FilterVerdict::kDelete
                                            : FilterVerdict::kKeep;
}

FilterVerdict PersonNameFilter(const KbTriple &triple,
                               const RelationTemplate &tmpl,
                               const ClozeScorer &scorer,
                               const Vocabulary &answers,
                               const Vocabulary &wordpieces,
                               const PersonNameOptions &options) {
  if (tmpl.name_noun == NameNoun::kNone) {
    throw std::invalid_argument("relation " + tmpl.relation +
                                " is not eligible for the person name filter");
  }
  if (options.top_k <= 0) return FilterVerdict::kKeep;
  const std::string gold = options.case_sensitive
                               ? triple.obj_surface
                               : AsciiLower(triple.obj_surface);
  for (const auto &part : SplitWhitespace(triple.sub_surface)) {
    std::string query =
        fmt::format("{} is a common name in the following {}: [MASK].", part,
                    NameNounWord(tmpl.name_noun));
    auto seq = BuildInput(query, {}, InputMode::kBert, nullptr, wordpieces);
    auto ranking = AnswerQuestion(seq, scorer, answers);
    size_t top = std::min<size_t>(options.top_k, ranking.size());
    for (size_t i = 0; i < top; ++i) {
      const std::string symbol = options.case_sensitive
                                     ? ranking[i].symbol
                                     : AsciiLower(ranking[i].symbol);
      if (symbol == gold) return FilterVerdict::kDelete;
    }
  }
  return FilterVerdict::kKeep;
}

UhnResult BuildLamaUhn(const std::vector<KbTriple> &dataset,
                       const std::vector<RelationTemplate> &templates,
                       const ClozeScorer &scorer, const Vocabulary &answers,
                       const Vocabulary &wordpieces,
                       const PersonNameOptions &options, int threads) {
  std::map<std::string, const RelationTemplate *> by_relation;
  for (const auto &t : templates) by_relation[t.relation] = &t;

  std::map<std::string, UhnStats> stats;
  UhnResult result;
  for (const auto &triple : dataset) {
    auto &s = stats[triple.relation];
    s.relation = triple.relation;
    ++s.original;
    if (StringMatchFilter(triple) == FilterVerdict::kKeep) {
      result.stage1.push_back(triple);
      ++s.string_match;
    }
  }

  std::vector<char> keep(result.stage1.size(), 1);
  ParallelFor(result.stage1.size(), threads, [&](size_t i) {
    const auto &triple = result.stage1[i];
    auto it = by_relation.find(triple.relation);
    if (it == by_relation.end() || it->second->name_noun == NameNoun::kNone) {
      return;
    }
    keep[i] = PersonNameFilter(triple, *it->second, scorer, answers,
                               wordpieces, options) == FilterVerdict::kKeep;
  });
  for (size_t i = 0; i < result.stage1.size(); ++i) {
    if (!keep[i]) continue;
    result.stage2.push_back(result.stage1[i]);
    ++stats[result.stage1[i].relation].person_name;
  }
  for (auto &[relation, s] : stats) result.stats.push_back(s);
  return result;
}

LamaData ReadLamaJsonl(std::istream &in, const std::string &default_relation,
                       const Vocabulary *wordpieces) {
  LamaData data;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error &e) {
      throw DataError(fmt::format("line {}: {}", line_number, e.what()));
    }
    if (!record.is_object() || !record.contains("sub_label") ||
        !record.contains("obj_label") || !record["sub_label"].is_string() ||
        !record["obj_label"].is_string()) {
      throw DataError(fmt::format(
          "line {}: expected string sub_label and obj_label", line_number));
    }
    KbTriple triple;
    triple.relation = default_relation;
    if (record.contains("relation")) {
      triple.relation = record["relation"].get<std::string>();
    } else if (record.contains("predicate_id")) {
      triple.relation = record["predicate_id"].get<std::string>();
    }
    triple.sub_surface = record["sub_label"].get<std::string>();
    triple.obj_surface = record["obj_label"].get<std::string>();
    if (record.contains("sub_entity") && record["sub_entity"].is_string()) {
      triple.sub_entity = record["sub_entity"].get<std::string>();
    }
    if (triple.obj_surface.empty() ||
        (wordpieces != nullptr && !wordpieces->Contains(triple.obj_surface))) {
      ++data.rejected;
      continue;
    }
    data.triples.push_back(std::move(triple));
  }
  return data;
}

LamaData LoadLamaData(const std::filesystem::path &path,
                      const Vocabulary *wordpieces) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto &entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  LamaData all;
  for (const auto &file : files) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    LamaData data;
    try {
      data = ReadLamaJsonl(in, file.stem().string(), wordpieces);
    } catch (const DataError &e) {
      throw DataError(file.string() + ": " + e.what());
    }
    all.rejected += data.rejected;
    for (auto &t : data.triples) all.triples.push_back(std::move(t));
  }
  return all;
}

void WriteLamaJsonl(const std::vector<KbTriple> &triples, std::ostream &out) {
  for (const auto &t : triples) {
    json record;
    record["relation"] = t.relation;
    record["sub_label"] = t.sub_surface;
    record["obj_label"] = t.obj_surface;
    if (t.sub_entity) record["sub_entity"] = *t.sub_entity;
    out << record.dump() << '\n';
  }
}

std::vector<RelationTemplate> LoadTemplates(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json list;
  try {
    list = json::parse(in);
  } catch (const json::parse_error &e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!list.is_array()) throw DataError(path.string() + ": expected a list");
  std::vector<RelationTemplate> templates;
  for (const auto &item : list) {
    try {
      std::string relation = item.at("relation").get<std::string>();
      std::string text = item.at("template").get<std::string>();
      NameNoun noun = item.contains("name_noun")
                          ? ParseNameNoun(item["name_noun"].get<std::string>())
                          : DefaultNameNoun(relation);
      templates.push_back(MakeTemplate(relation, text, noun));
    } catch (const json::exception &e) {
      throw DataError(path.string() + ": " + e.what());
    } catch (const std::invalid_argument &e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return templates;
}

void AttachEntities(const std::map<std::string, std::string> &surface_to_entity,
                    std::vector<KbTriple> *triples) {
  for (auto &t : *triples) {
    auto it = surface_to_entity.find(t.sub_surface);
    if (it != surface_to_entity.end()) t.sub_entity = it->second;
  }
}

}  // namespace ebert

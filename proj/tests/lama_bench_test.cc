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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "ebert/error.h"
#include "ebert/lama_bench.h"
#include "test_util.h"

namespace ebert {
namespace {

using testing::MakeSpace;
using testing::TempDir;
using testing::WriteFile;

Vocabulary Pieces() {
  return Vocabulary({"[UNK]", "[MASK]", "[CLS]", "[SEP]", "/", ".", ":",
                     "The", "native", "language", "of", "is", "a", "common",
                     "name", "in", "the", "following", "city", "country",
                     "Jean", "Marais", "Mara", "##is", "French", "German",
                     "English", "Italian", "Paris"});
}

// Logits keyed by the first wordpiece of the probe that names a stub entry.
class StubScorer : public ClozeScorer {
 public:
  void Rank(const std::string &part, const std::vector<std::string> &order,
            const Vocabulary &answers) {
    std::vector<double> logits(answers.size(), -100.0);
    for (size_t i = 0; i < order.size(); ++i) {
      logits[*answers.Find(order[i])] = -static_cast<double>(i);
    }
    table_[part] = logits;
  }

  std::vector<double> AnswerLogits(const TokenSequence &sequence,
                                   const Vocabulary &answers) const override {
    ++calls_;
    for (const auto &token : sequence.tokens) {
      if (auto *piece = std::get_if<WordpieceToken>(&token)) {
        if (auto it = table_.find(piece->piece); it != table_.end()) {
          return it->second;
        }
      }
    }
    return std::vector<double>(answers.size(), 0.0);
  }

  int calls() const { return calls_; }

 private:
  std::map<std::string, std::vector<double>> table_;
  mutable std::atomic<int> calls_{0};
};

const RelationTemplate kNativeLanguage = MakeTemplate(
    "P103", "The native language of [X] is [MASK] .", NameNoun::kLanguage);

KbTriple JeanMarais() {
  return {"P103", "Jean Marais", "ENTITY/Jean_Marais", "French"};
}

QuestionResult Result(const std::string &gold,
                      const std::vector<std::string> &ranking) {
  QuestionResult q{gold, {}};
  for (size_t i = 0; i < ranking.size(); ++i) {
    q.ranking.push_back({ranking[i], 1.0 / (i + 1)});
  }
  return q;
}

TEST_CASE("templates need both placeholders once") {
  auto t = MakeTemplate("P19", "[X] was born in [Y] .", NameNoun::kCity);
  CHECK(t.text == "[X] was born in [MASK] .");
  CHECK_THROWS_AS(MakeTemplate("P19", "[X] was born .", NameNoun::kCity),
                  std::invalid_argument);
  CHECK_THROWS_AS(MakeTemplate("P19", "[X] [X] [MASK]", NameNoun::kCity),
                  std::invalid_argument);
  CHECK_THROWS_AS(MakeTemplate("P19", "born in [MASK]", NameNoun::kCity),
                  std::invalid_argument);
}

TEST_CASE("name nouns follow the answer type of the relation") {
  CHECK(DefaultNameNoun("P103") == NameNoun::kLanguage);
  CHECK(DefaultNameNoun("T-REx:P1412") == NameNoun::kLanguage);
  CHECK(DefaultNameNoun("P27") == NameNoun::kCountry);
  CHECK(DefaultNameNoun("P19") == NameNoun::kCity);
  CHECK(DefaultNameNoun("P20") == NameNoun::kCity);
  CHECK(DefaultNameNoun("Google-RE:place_of_birth") == NameNoun::kCity);
  CHECK(DefaultNameNoun("place_of_death") == NameNoun::kCity);
  CHECK(DefaultNameNoun("P176") == NameNoun::kNone);
  CHECK(ParseNameNoun(NameNounWord(NameNoun::kCountry)) == NameNoun::kCountry);
  CHECK_THROWS_AS(ParseNameNoun("planet"), std::invalid_argument);
}

TEST_CASE("rendered questions") {
  auto vocab = Pieces();
  auto entities = MakeSpace({{"ENTITY/Jean_Marais", {1.0f}}},
                            SpaceKind::kWordAndEntity);
  auto bert = RenderQuestion(JeanMarais(), kNativeLanguage, InputMode::kBert,
                             &entities, vocab);
  CHECK(ToString(bert) ==
        "[CLS] The native language of Jean Marais is [MASK] . [SEP]");
  CHECK(std::holds_alternative<MaskToken>(bert.tokens[bert.size() - 3]));

  auto concat = RenderQuestion(JeanMarais(), kNativeLanguage,
                               InputMode::kConcat, &entities, vocab);
  CHECK(ToString(concat) ==
        "[CLS] The native language of ENTITY/Jean_Marais / Jean Marais is "
        "[MASK] . [SEP]");
  CHECK(std::holds_alternative<EntityToken>(concat.tokens[5]));

  auto replace = RenderQuestion(JeanMarais(), kNativeLanguage,
                                InputMode::kReplace, &entities, vocab);
  CHECK(ToString(replace) ==
        "[CLS] The native language of ENTITY/Jean_Marais is [MASK] . [SEP]");

  KbTriple unresolved = JeanMarais();
  unresolved.sub_entity.reset();
  CHECK(RenderQuestion(unresolved, kNativeLanguage, InputMode::kReplace,
                       &entities, vocab) == bert);

  RelationTemplate broken{"P103", "no placeholders", NameNoun::kNone};
  CHECK_THROWS_AS(RenderQuestion(JeanMarais(), broken, InputMode::kBert,
                                 &entities, vocab),
                  std::invalid_argument);
}

TEST_CASE("concat renders split pieces of the subject") {
  Vocabulary vocab({"[UNK]", "[MASK]", "[CLS]", "[SEP]", "/", ".", "The",
                    "native", "language", "of", "is", "Jean", "Mara", "##is"});
  auto entities = MakeSpace({{"ENTITY/Jean_Marais", {1.0f}}},
                            SpaceKind::kWordAndEntity);
  auto concat = RenderQuestion(JeanMarais(), kNativeLanguage,
                               InputMode::kConcat, &entities, vocab);
  std::vector<Token> subject(concat.tokens.begin() + 5, concat.tokens.begin() + 10);
  CHECK(subject == std::vector<Token>{Entity("ENTITY/Jean_Marais"),
                                      Control(ControlKind::kSlash),
                                      Piece("Jean"), Piece("Mara"),
                                      Piece("##is")});
}

TEST_CASE("answers are ranked over the answer vocabulary only") {
  auto wp = std::make_shared<const EmbeddingSpace>(MakeSpace(
      {{"[CLS]", {0, 0, 0}}, {"[SEP]", {0, 0, 0}}, {"[MASK]", {0, 0, 0}},
       {"[UNK]", {0, 0, 0}}, {"speaks", {3, 1, 0}}, {"French", {1, 0, 0}},
       {"German", {0, 1, 0}}, {"Dutch", {0, 1, 0}}, {"Latin", {0, 0, 1}}},
      SpaceKind::kWordpiece));
  MaskedLm lm(wp, nullptr, std::make_shared<ReferenceEncoder>(),
              AffineHead::Identity(3));
  TokenSequence seq{{Control(ControlKind::kCls), Piece("speaks"), MaskToken{},
                     Control(ControlKind::kSep)}};
  Vocabulary answers({"Latin", "German", "Dutch", "French"});
  auto ranking = AnswerQuestion(seq, lm, answers);
  REQUIRE(ranking.size() == 4);
  // h = speaks / 3, so French scores 1 and the tied German/Dutch 1/3.
  CHECK(ranking[0].symbol == "French");
  CHECK(ranking[1].symbol == "German");
  CHECK(ranking[2].symbol == "Dutch");
  CHECK(ranking[3].symbol == "Latin");
  CHECK(ranking[1].probability == ranking[2].probability);
  for (size_t i = 1; i < ranking.size(); ++i) {
    CHECK(ranking[i - 1].probability >= ranking[i].probability);
  }
  Vocabulary three({"Latin", "German", "French"});
  CHECK(AnswerQuestion(seq, lm, three).size() == 3);

  TokenSequence no_mask{{Piece("speaks")}};
  CHECK_THROWS_AS(AnswerQuestion(no_mask, lm, answers), std::invalid_argument);
  TokenSequence two_masks{{MaskToken{}, MaskToken{}}};
  CHECK_THROWS_AS(AnswerQuestion(two_masks, lm, answers), std::invalid_argument);
}

TEST_CASE("hits at k examples") {
  std::map<std::string, std::vector<QuestionResult>> single = {
      {"P1", {Result("a", {"a", "b"})}}};
  CHECK(HitsAtK(single, 1).overall == 1.0);

  std::map<std::string, std::vector<QuestionResult>> macro = {
      {"A", {Result("a", {"a", "b"}), Result("a", {"b", "a"})}},
      {"B", {Result("b", {"b", "a"}), Result("b", {"b", "a"}),
             Result("a", {"a", "b"})}}};
  auto report = HitsAtK(macro, 1);
  CHECK(report.per_relation["A"] == doctest::Approx(0.5));
  CHECK(report.per_relation["B"] == doctest::Approx(1.0));
  CHECK(report.overall == doctest::Approx(0.75));
  CHECK(report.overall != doctest::Approx(0.8));
  CHECK(report.counts["B"] == 3);
  CHECK(HitsAtK(macro, 2).overall == 1.0);
  CHECK(HitsAtK(macro, 50).overall == 1.0);

  CHECK_THROWS_AS(HitsAtK(macro, 0), std::invalid_argument);
  std::map<std::string, std::vector<QuestionResult>> empty_group = {{"A", {}}};
  CHECK_THROWS_AS(HitsAtK(empty_group, 1), std::invalid_argument);
}

TEST_CASE("hits matching is case-sensitive") {
  std::map<std::string, std::vector<QuestionResult>> data = {
      {"A", {Result("French", {"french", "French"})}}};
  CHECK(HitsAtK(data, 1).overall == 0.0);
  CHECK(HitsAtK(data, 2).overall == 1.0);
}

TEST_CASE("hits at k is monotone in k and macro-averaged") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> size(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, std::vector<QuestionResult>> data;
    for (int r = 0; r < 4; ++r) {
      auto &group = data["R" + std::to_string(r)];
      int n = size(rng);
      for (int i = 0; i < n; ++i) {
        auto order = vocab;
        std::shuffle(order.begin(), order.end(), rng);
        group.push_back(Result(vocab[pick(rng)], order));
      }
    }
    double last = -1.0;
    std::map<std::string, double> last_rel;
    for (int k = 1; k <= 7; ++k) {
      auto report = HitsAtK(data, k);
      CHECK(report.overall >= last);
      last = report.overall;
      for (const auto &[rel, v] : report.per_relation) {
        CHECK(v >= last_rel[rel]);
        last_rel[rel] = v;
      }
    }
    CHECK(last == 1.0);

    // Repeating every question of a relation keeps its mean and the overall.
    auto base = HitsAtK(data, 2);
    auto grown = data;
    auto &group = grown["R0"];
    auto copy = group;
    for (int rep = 0; rep < 3; ++rep) group.insert(group.end(), copy.begin(), copy.end());
    CHECK(HitsAtK(grown, 2).overall == doctest::Approx(base.overall).epsilon(1e-12));
  }
}

TEST_CASE("string match examples") {
  CHECK(StringMatchFilter({"P176", "Fiat Multipla", {}, "Fiat"}) ==
        FilterVerdict::kDelete);
  CHECK(StringMatchFilter({"P138", "Christmas Island", {}, "Christmas"}) ==
        FilterVerdict::kDelete);
  CHECK(StringMatchFilter({"P1001", "Australian Senate", {}, "Australia"}) ==
        FilterVerdict::kDelete);
  CHECK(StringMatchFilter(JeanMarais()) == FilterVerdict::kKeep);
}

TEST_CASE("string match ignores case on either side") {
  std::mt19937_64 rng(18);
  const std::string letters = "abcAB ";
  std::uniform_int_distribution<int> pick(0, static_cast<int>(letters.size()) - 1);
  std::uniform_int_distribution<int> len(1, 8);
  std::bernoulli_distribution coin(0.5);
  auto random_case = [&](std::string s) {
    for (auto &c : s) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        c = coin(rng) ? std::toupper(c) : std::tolower(c);
      }
    }
    return s;
  };
  for (int trial = 0; trial < 500; ++trial) {
    std::string sub, obj;
    for (int i = len(rng); i > 0; --i) sub += letters[pick(rng)];
    for (int i = len(rng) / 3 + 1; i > 0; --i) obj += letters[pick(rng)];
    auto verdict = StringMatchFilter({"R", sub, {}, obj});
    CHECK(StringMatchFilter({"R", random_case(sub), {}, random_case(obj)}) ==
          verdict);
  }
}

TEST_CASE("person name filter decision logic") {
  auto vocab = Pieces();
  Vocabulary answers({"French", "German", "English", "Italian", "Paris"});
  StubScorer stub;
  stub.Rank("Jean", {"French", "German", "English", "Italian"}, answers);
  stub.Rank("Marais", {"German", "English", "Italian", "French"}, answers);
  CHECK(PersonNameFilter(JeanMarais(), kNativeLanguage, stub, answers, vocab) ==
        FilterVerdict::kDelete);

  StubScorer fourth;
  fourth.Rank("Jean", {"German", "English", "Italian", "French"}, answers);
  fourth.Rank("Marais", {"English", "German", "Italian", "French"}, answers);
  CHECK(PersonNameFilter(JeanMarais(), kNativeLanguage, fourth, answers, vocab) ==
        FilterVerdict::kKeep);

  KbTriple nameless{"P103", "", {}, "French"};
  CHECK(PersonNameFilter(nameless, kNativeLanguage, stub, answers, vocab) ==
        FilterVerdict::kKeep);

  PersonNameOptions none;
  none.top_k = 0;
  CHECK(PersonNameFilter(JeanMarais(), kNativeLanguage, stub, answers, vocab,
                         none) == FilterVerdict::kKeep);

  PersonNameOptions all;
  all.top_k = answers.size();
  CHECK(PersonNameFilter(JeanMarais(), kNativeLanguage, fourth, answers, vocab,
                         all) == FilterVerdict::kDelete);

  RelationTemplate ineligible = MakeTemplate("P176", "[X] by [MASK] .", NameNoun::kNone);
  CHECK_THROWS_AS(PersonNameFilter(JeanMarais(), ineligible, stub, answers, vocab),
                  std::invalid_argument);
}

TEST_CASE("person name probes use the relation noun") {
  auto vocab = Pieces();
  Vocabulary answers({"French", "Paris"});
  class Recorder : public ClozeScorer {
   public:
    std::vector<double> AnswerLogits(const TokenSequence &seq,
                                     const Vocabulary &answers) const override {
      std::lock_guard<std::mutex> lock(mu);
      probes.push_back(ToString(seq));
      return std::vector<double>(answers.size(), 0.0);
    }
    mutable std::mutex mu;
    mutable std::vector<std::string> probes;
  } recorder;
  RelationTemplate born = MakeTemplate("P19", "[X] was born in [MASK] .", NameNoun::kCity);
  PersonNameFilter({"P19", "Jean Marais", {}, "Lyon"}, born, recorder, answers, vocab);
  REQUIRE(recorder.probes.size() == 2);
  CHECK(recorder.probes[0] ==
        "[CLS] Jean is a common name in the following city : [MASK] . [SEP]");
  CHECK(recorder.probes[1] ==
        "[CLS] Marais is a common name in the following city : [MASK] . [SEP]");
}

TEST_CASE("case-insensitive person name matching is opt-in") {
  auto vocab = Pieces();
  Vocabulary answers({"french", "German", "English", "Italian"});
  StubScorer stub;
  stub.Rank("Jean", {"french", "German", "English", "Italian"}, answers);
  PersonNameOptions options;
  CHECK(PersonNameFilter(JeanMarais(), kNativeLanguage, stub, answers, vocab,
                         options) == FilterVerdict::kKeep);
  options.case_sensitive = false;
  CHECK(PersonNameFilter(JeanMarais(), kNativeLanguage, stub, answers, vocab,
                         options) == FilterVerdict::kDelete);
}

TEST_CASE("top_k equal to the vocabulary deletes every answerable triple") {
  auto vocab = Pieces();
  Vocabulary answers({"French", "German", "English"});
  StubScorer stub;
  PersonNameOptions all;
  all.top_k = answers.size();
  for (const auto &answer : {"French", "German", "English"}) {
    KbTriple t{"P103", "Jean Marais", {}, answer};
    CHECK(PersonNameFilter(t, kNativeLanguage, stub, answers, vocab, all) ==
          FilterVerdict::kDelete);
  }
  KbTriple outside{"P103", "Jean Marais", {}, "Klingon"};
  CHECK(PersonNameFilter(outside, kNativeLanguage, stub, answers, vocab, all) ==
        FilterVerdict::kKeep);
}

TEST_CASE("UHN build counts each stage") {
  auto vocab = Pieces();
  Vocabulary answers({"French", "German", "English", "Italian", "Paris"});
  StubScorer stub;
  std::vector<RelationTemplate> templates = {
      kNativeLanguage,
      MakeTemplate("P176", "[X] is produced by [MASK] .", NameNoun::kNone)};

  SUBCASE("no matches leave the data unchanged") {
    std::vector<KbTriple> data = {{"P176", "Model T", {}, "Ford"},
                                  {"P176", "Beetle", {}, "Volkswagen"}};
    auto result = BuildLamaUhn(data, templates, stub, answers, vocab);
    CHECK(result.stage1 == data);
    CHECK(result.stage2 == data);
    REQUIRE(result.stats.size() == 1);
    CHECK(result.stats[0].original == 2);
    CHECK(result.stats[0].person_name == 2);
  }

  SUBCASE("eight substring answers out of ten") {
    std::vector<KbTriple> data;
    for (int i = 0; i < 8; ++i) {
      data.push_back({"P176", "Fiat Model " + std::to_string(i), {}, "Fiat"});
    }
    data.push_back({"P176", "Model T", {}, "Ford"});
    data.push_back({"P176", "Beetle", {}, "Volkswagen"});
    auto result = BuildLamaUhn(data, templates, stub, answers, vocab);
    REQUIRE(result.stats.size() == 1);
    const auto &s = result.stats[0];
    CHECK(s.original == 10);
    CHECK(s.string_match == 2);
    CHECK(100.0 * (s.original - s.string_match) / s.original == doctest::Approx(80.0));
  }

  SUBCASE("stage one deletions are not probed again") {
    stub.Rank("Jean", {"French"}, answers);
    std::vector<KbTriple> data = {JeanMarais(),
                                  {"P103", "Jean French", {}, "French"}};
    auto result = BuildLamaUhn(data, templates, stub, answers, vocab);
    CHECK(result.stage1.size() == 1);
    CHECK(result.stage2.empty());
    CHECK(stub.calls() == 1);
  }
}

TEST_CASE("UHN stages are nested on random data") {
  auto vocab = Pieces();
  Vocabulary answers({"French", "German", "English", "Italian", "Paris"});
  StubScorer stub;
  stub.Rank("Jean", {"French", "Paris", "German"}, answers);
  stub.Rank("Marais", {"Italian", "English", "Paris"}, answers);
  std::vector<RelationTemplate> templates = {
      kNativeLanguage,
      MakeTemplate("P19", "[X] was born in [MASK] .", NameNoun::kCity),
      MakeTemplate("P176", "[X] is produced by [MASK] .", NameNoun::kNone)};
  const std::vector<std::string> relations = {"P103", "P19", "P176"};
  const std::vector<std::string> parts = {"Jean", "Marais", "paris", "Ana",
                                          "French", "Bo"};
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> rel(0, 2), part(0, 5), ans(0, 4), n(0, 3);
  std::vector<KbTriple> data;
  for (int i = 0; i < 200; ++i) {
    std::string sub;
    for (int p = n(rng); p >= 0; --p) sub += (sub.empty() ? "" : " ") + parts[part(rng)];
    data.push_back({relations[rel(rng)], sub, {}, answers.Symbol(ans(rng))});
  }
  auto result = BuildLamaUhn(data, templates, stub, answers, vocab);
  auto serial = result;
  auto parallel = BuildLamaUhn(data, templates, stub, answers, vocab, {}, 4);
  CHECK(parallel.stage2 == serial.stage2);

  auto is_subsequence = [](const std::vector<KbTriple> &small,
                           const std::vector<KbTriple> &big) {
    size_t j = 0;
    for (const auto &t : big) {
      if (j < small.size() && small[j] == t) ++j;
    }
    return j == small.size();
  };
  CHECK(is_subsequence(result.stage1, data));
  CHECK(is_subsequence(result.stage2, result.stage1));
  int total = 0;
  for (const auto &s : result.stats) {
    CHECK(s.original >= s.string_match);
    CHECK(s.string_match >= s.person_name);
    total += s.original;
    if (s.relation == "P176") CHECK(s.string_match == s.person_name);
  }
  CHECK(total == 200);
  CHECK(result.stage1.size() < data.size());
  CHECK(result.stage2.size() < result.stage1.size());
}

TEST_CASE("LAMA files load per relation and reject multi-piece answers") {
  TempDir dir;
  std::filesystem::create_directories(dir / "data");
  WriteFile(dir / "data/P103.jsonl",
            "{\"sub_label\": \"Jean Marais\", \"obj_label\": \"French\", "
            "\"sub_uri\": \"Q168359\"}\n\n"
            "{\"sub_label\": \"Ana\", \"obj_label\": \"Esperanto\"}\n");
  WriteFile(dir / "data/P19.jsonl",
            "{\"sub_label\": \"Jean Marais\", \"obj_label\": \"Paris\", "
            "\"predicate_id\": \"P20\"}\n");
  WriteFile(dir / "data/notes.txt", "ignored");
  auto vocab = Pieces();
  auto data = LoadLamaData(dir / "data", &vocab);
  CHECK(data.rejected == 1);
  REQUIRE(data.triples.size() == 2);
  CHECK(data.triples[0] == KbTriple{"P103", "Jean Marais", std::nullopt, "French"});
  CHECK(data.triples[1].relation == "P20");

  auto single = LoadLamaData(dir / "data/P19.jsonl", nullptr);
  CHECK(single.triples.size() == 1);

  WriteFile(dir / "bad.jsonl", "{\"sub_label\": 3}\n");
  CHECK_THROWS_AS(LoadLamaData(dir / "bad.jsonl", nullptr), DataError);
  WriteFile(dir / "broken.jsonl", "{not json\n");
  CHECK_THROWS_AS(LoadLamaData(dir / "broken.jsonl", nullptr), DataError);
}

TEST_CASE("triples round-trip through JSON lines") {
  std::vector<KbTriple> triples = {JeanMarais(), {"P19", "Ana", {}, "Paris"}};
  std::stringstream ss;
  WriteLamaJsonl(triples, ss);
  auto back = ReadLamaJsonl(ss, "unused", nullptr);
  CHECK(back.triples == triples);
}

TEST_CASE("templates load from a JSON list") {
  TempDir dir;
  WriteFile(dir / "t.json",
            R"([{"relation": "P19", "template": "[X] was born in [Y] ."},
                {"relation": "P176", "template": "[X] by [MASK] .", "name_noun": "none"},
                {"relation": "P103", "template": "[X] speaks [MASK] .", "name_noun": "city"}])");
  auto templates = LoadTemplates(dir / "t.json");
  REQUIRE(templates.size() == 3);
  CHECK(templates[0].name_noun == NameNoun::kCity);
  CHECK(templates[0].text == "[X] was born in [MASK] .");
  CHECK(templates[1].name_noun == NameNoun::kNone);
  CHECK(templates[2].name_noun == NameNoun::kCity);

  WriteFile(dir / "bad.json", R"([{"relation": "P19", "template": "no slots"}])");
  CHECK_THROWS_AS(LoadTemplates(dir / "bad.json"), DataError);
  WriteFile(dir / "obj.json", R"({"relation": "P19"})");
  CHECK_THROWS_AS(LoadTemplates(dir / "obj.json"), DataError);
}

TEST_CASE("entities attach by surface") {
  std::vector<KbTriple> triples = {{"P103", "Jean Marais", {}, "French"},
                                   {"P103", "Ana", {}, "German"}};
  AttachEntities({{"Jean Marais", "ENTITY/Jean_Marais"}}, &triples);
  CHECK(triples[0].sub_entity == "ENTITY/Jean_Marais");
  CHECK_FALSE(triples[1].sub_entity.has_value());
}

}  // namespace
}  // namespace ebert

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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "ebert/alignment.h"
#include "ebert/embeddings.h"
#include "ebert/entity_linking.h"
#include "ebert/error.h"
#include "ebert/lama_bench.h"
#include "ebert/parallel.h"
#include "ebert/scorer.h"
#include "ebert/text_input.h"
#include "ebert/wikidata_client.h"

namespace ebert::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct GlobalFlags {
  unsigned long seed = 1;
  int verbosity = 0;
};

// Writes to `path`, or to the fallback stream when the path is empty.
class Output {
 public:
  Output(const std::string &path, std::ostream &fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DataError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream &stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream *stream_;
};

std::ofstream OpenFile(const fs::path &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::vector<std::string> ReadLines(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// Surface -> entity symbol from a resolution TSV (surface, qid, url, ...).
std::map<std::string, std::string> LoadResolutions(const fs::path &path) {
  std::map<std::string, std::string> map;
  for (const auto &line : ReadLines(path)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() < 3) {
      throw DataError(path.string() + ": resolution rows need 3 columns");
    }
    if (!fields[2].empty()) map[fields[0]] = UrlToEntitySymbol(fields[2]);
  }
  return map;
}

Vocabulary AnswerVocabulary(const std::string &path,
                            const std::vector<KbTriple> &triples) {
  if (!path.empty()) return Vocabulary(ReadLines(path));
  std::set<std::string> answers;
  for (const auto &t : triples) answers.insert(t.obj_surface);
  return Vocabulary(std::vector<std::string>(answers.begin(), answers.end()));
}

std::shared_ptr<const EmbeddingSpace> LoadEntities(const std::string &wiki_path,
                                                   const std::string &align_path) {
  auto wiki = LoadSpace(wiki_path, SpaceKind::kWordAndEntity);
  auto map = LoadAlignment(align_path);
  if (map.source_dim() != wiki.dim()) {
    throw DataError(fmt::format("alignment expects dimension {}, {} has {}",
                                map.source_dim(), wiki_path, wiki.dim()));
  }
  return std::make_shared<const EmbeddingSpace>(DeriveEntitySpace(map, wiki));
}

// ---------------------------------------------------------------- align

struct AlignFlags {
  std::string src, tgt, out, entities_out, report;
  bool l2_normalize = false;
};

int RunAlign(const AlignFlags &flags, std::ostream &out) {
  auto wiki = LoadSpace(flags.src, SpaceKind::kWordAndEntity);
  auto wordpieces = LoadSpace(flags.tgt, SpaceKind::kWordpiece);
  auto pairs = SharedVocabulary(wordpieces, wiki);
  AlignmentOptions options;
  options.l2_normalize = flags.l2_normalize;
  auto map = FitAlignment(wiki, wordpieces, pairs, options);
  SaveAlignment(map, flags.out);
  auto entities = DeriveEntitySpace(map, wiki);
  if (!flags.entities_out.empty()) SaveSpace(entities, flags.entities_out);

  Output report(flags.report, out);
  auto &os = report.stream();
  os << "shared_count\t" << map.shared_count << '\n';
  os << fmt::format("residual\t{:.6e}\n", map.residual);
  os << "rank_deficient\t" << (map.rank_deficient ? 1 : 0) << '\n';
  os << "target_dim\t" << map.target_dim() << '\n';
  os << "source_dim\t" << map.source_dim() << '\n';
  os << "entities\t" << entities.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------- synth-align

struct SynthFlags {
  std::string out_dir;
  int dim = 8;
  int words = 32;
  int entities = 4;
  int target_dim = 0;
};

// Integer-valued spaces with tgt = W* src exactly, so the fit is noiseless.
int RunSynthAlign(const SynthFlags &flags, const GlobalFlags &global,
                  std::ostream &out) {
  if (flags.dim < 1 || flags.words < 1 || flags.entities < 0) {
    throw std::invalid_argument("synth-align needs positive sizes");
  }
  const int src_dim = flags.dim;
  const int tgt_dim = flags.target_dim > 0 ? flags.target_dim : flags.dim;
  std::mt19937_64 rng(global.seed);
  std::uniform_int_distribution<int> small(-3, 3);
  Matrix weights(tgt_dim, src_dim);
  for (int i = 0; i < tgt_dim; ++i) {
    for (int j = 0; j < src_dim; ++j) weights(i, j) = small(rng);
  }

  Vocabulary wiki_vocab, wp_vocab;
  FloatRows wiki_rows(flags.words + flags.entities, src_dim);
  FloatRows wp_rows(flags.words + 4, tgt_dim);
  for (const char *special : {"[CLS]", "[SEP]", "[MASK]", "[UNK]"}) {
    int id = wp_vocab.Add(special);
    for (int j = 0; j < tgt_dim; ++j) wp_rows(id, j) = static_cast<float>(small(rng));
  }
  for (int w = 0; w < flags.words; ++w) {
    std::string symbol = fmt::format("w{}", w);
    Vector x(src_dim);
    for (int j = 0; j < src_dim; ++j) x(j) = small(rng);
    Vector y = weights * x;
    int wiki_id = wiki_vocab.Add(symbol);
    wiki_rows.row(wiki_id) = x.cast<float>().transpose();
    int wp_id = wp_vocab.Add(symbol);
    wp_rows.row(wp_id) = y.cast<float>().transpose();
  }
  for (int e = 0; e < flags.entities; ++e) {
    int id = wiki_vocab.Add(fmt::format("ENTITY/Entity_{}", e));
    for (int j = 0; j < src_dim; ++j) wiki_rows(id, j) = static_cast<float>(small(rng));
  }
  fs::create_directories(flags.out_dir);
  SaveSpace(EmbeddingSpace(std::move(wiki_vocab), std::move(wiki_rows),
                           SpaceKind::kWordAndEntity),
            fs::path(flags.out_dir) / "wiki.txt");
  SaveSpace(EmbeddingSpace(std::move(wp_vocab), std::move(wp_rows),
                           SpaceKind::kWordpiece),
            fs::path(flags.out_dir) / "wordpieces.txt");
  AlignmentMap truth;
  truth.weights = weights;
  truth.shared_count = flags.words;
  SaveAlignment(truth, fs::path(flags.out_dir) / "true_alignment.txt");
  out << "wrote " << flags.out_dir << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ eval-lama

struct EvalFlags {
  std::string data, templates, wp_space, ent_space, align, mode = "bert";
  std::string resolutions, answer_vocab, stage = "0", out;
  int k = 1;
  int threads = 1;
};

int RunEvalLama(const EvalFlags &flags, std::ostream &out, std::ostream &err) {
  auto wordpieces = std::make_shared<const EmbeddingSpace>(
      LoadSpace(flags.wp_space, SpaceKind::kWordpiece));
  auto entities = LoadEntities(flags.ent_space, flags.align);
  InputMode mode = ParseInputMode(flags.mode);
  if (flags.k < 1) throw std::invalid_argument("--k must be at least 1");

  auto data = LoadLamaData(flags.data, &wordpieces->vocab());
  if (data.rejected > 0) {
    err << "rejected " << data.rejected
        << " triples whose answer is not a single wordpiece\n";
  }
  if (!flags.resolutions.empty()) {
    AttachEntities(LoadResolutions(flags.resolutions), &data.triples);
  }
  std::map<std::string, RelationTemplate> templates;
  for (auto &t : LoadTemplates(flags.templates)) templates[t.relation] = t;
  Vocabulary answers = AnswerVocabulary(flags.answer_vocab, data.triples);

  MaskedLm lm(wordpieces, entities, std::make_shared<ReferenceEncoder>(),
              AffineHead::Identity(wordpieces->dim()));
  std::vector<QuestionResult> results(data.triples.size());
  ParallelFor(data.triples.size(), flags.threads, [&](size_t i) {
    const auto &triple = data.triples[i];
    auto it = templates.find(triple.relation);
    if (it == templates.end()) {
      throw DataError("no template for relation " + triple.relation);
    }
    auto seq = RenderQuestion(triple, it->second, mode, entities.get(),
                              wordpieces->vocab());
    auto ranking = AnswerQuestion(seq, lm, answers);
    ranking.resize(std::min<size_t>(ranking.size(), flags.k));
    results[i] = {triple.obj_surface, std::move(ranking)};
  });

  std::map<std::string, std::vector<QuestionResult>> by_relation;
  for (size_t i = 0; i < results.size(); ++i) {
    by_relation[data.triples[i].relation].push_back(std::move(results[i]));
  }
  if (by_relation.empty()) throw DataError("no questions to evaluate");
  auto report = HitsAtK(by_relation, flags.k);

  Output output(flags.out, out);
  auto &os = output.stream();
  os << "relation\tstage\thits@" << flags.k << "\tquestions\n";
  for (const auto &[relation, value] : report.per_relation) {
    os << fmt::format("{}\t{}\t{:.6f}\t{}\n", relation, flags.stage, value,
                      report.counts[relation]);
  }
  os << fmt::format("overall\t{}\t{:.6f}\t{}\n", flags.stage, report.overall,
                    data.triples.size());
  return kExitOk;
}

// ----------------------------------------------------------- filter-uhn

struct FilterFlags {
  std::string data, templates, out_dir, wp_space, answer_vocab;
  int top_k = 3;
  bool case_insensitive = false;
  int threads = 1;
};

int RunFilterUhn(const FilterFlags &flags, std::ostream &out,
                 std::ostream &err) {
  auto wordpieces = std::make_shared<const EmbeddingSpace>(
      LoadSpace(flags.wp_space, SpaceKind::kWordpiece));
  auto data = LoadLamaData(flags.data, &wordpieces->vocab());
  if (data.rejected > 0) {
    err << "rejected " << data.rejected
        << " triples whose answer is not a single wordpiece\n";
  }
  auto templates = LoadTemplates(flags.templates);
  Vocabulary answers = AnswerVocabulary(flags.answer_vocab, data.triples);
  MaskedLm lm(wordpieces, nullptr, std::make_shared<ReferenceEncoder>(),
              AffineHead::Identity(wordpieces->dim()));
  PersonNameOptions options;
  options.top_k = flags.top_k;
  options.case_sensitive = !flags.case_insensitive;
  auto result = BuildLamaUhn(data.triples, templates, lm, answers,
                             wordpieces->vocab(), options, flags.threads);

  fs::create_directories(flags.out_dir);
  const fs::path dir(flags.out_dir);
  {
    auto os = OpenFile(dir / "stage0.jsonl");
    WriteLamaJsonl(data.triples, os);
  }
  {
    auto os = OpenFile(dir / "stage1.jsonl");
    WriteLamaJsonl(result.stage1, os);
  }
  {
    auto os = OpenFile(dir / "stage2.jsonl");
    WriteLamaJsonl(result.stage2, os);
  }
  auto os = OpenFile(dir / "stats.tsv");
  os << "relation\tstage\tquestions\tdeleted_pct\n";
  auto pct = [](int kept, int original) {
    return original == 0 ? 0.0 : 100.0 * (original - kept) / original;
  };
  int total[3] = {0, 0, 0};
  for (const auto &s : result.stats) {
    const int counts[3] = {s.original, s.string_match, s.person_name};
    for (int stage = 0; stage < 3; ++stage) {
      os << fmt::format("{}\t{}\t{}\t{:.2f}\n", s.relation, stage,
                        counts[stage], pct(counts[stage], s.original));
      total[stage] += counts[stage];
    }
  }
  for (int stage = 0; stage < 3; ++stage) {
    os << fmt::format("overall\t{}\t{}\t{:.2f}\n", stage, total[stage],
                      pct(total[stage], total[0]));
  }
  out << fmt::format("stage0\t{}\nstage1\t{}\nstage2\t{}\n", total[0],
                     total[1], total[2]);
  return kExitOk;
}

// ----------------------------------------------------------------- link

struct LinkFlags {
  std::string docs, table, redirects, wp_space, ent_space, align, model,
      out_dir;
  bool train = false;
  bool eval = false;
  int iterations = 3;
  int epochs = 10;
  double step_size = 0.1;
  std::string head_init = "identity";
  double null_bias = 0.0;
  std::string mask = "entity";
  int max_span = kDefaultMaxSpan;
  int threads = 1;
};

json VectorToJson(const Vector &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector JsonToVector(const json &j) {
  auto values = j.get<std::vector<double>>();
  return Eigen::Map<Vector>(values.data(), values.size());
}

void SaveLinkerParams(const LinkerParams &params, const fs::path &path) {
  json doc;
  doc["head"]["a"] = json::array();
  for (int i = 0; i < params.head.a.rows(); ++i) {
    doc["head"]["a"].push_back(VectorToJson(params.head.a.row(i).transpose()));
  }
  doc["head"]["c"] = VectorToJson(params.head.c);
  doc["null_entity"]["embedding"] = VectorToJson(params.eps.embedding);
  doc["null_entity"]["bias"] = params.eps.bias;
  auto os = OpenFile(path);
  os << doc.dump(1) << '\n';
}

LinkerParams LoadLinkerParams(const fs::path &path, int dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  LinkerParams params;
  try {
    json doc = json::parse(in);
    const auto &rows = doc.at("head").at("a");
    params.head.a.resize(rows.size(), dim);
    for (size_t i = 0; i < rows.size(); ++i) {
      Vector row = JsonToVector(rows[i]);
      if (row.size() != dim) throw DataError("head row has the wrong size");
      params.head.a.row(i) = row.transpose();
    }
    params.head.c = JsonToVector(doc.at("head").at("c"));
    params.eps.embedding = JsonToVector(doc.at("null_entity").at("embedding"));
    params.eps.bias = doc.at("null_entity").at("bias").get<double>();
  } catch (const json::exception &e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (params.head.a.rows() != dim || params.head.c.size() != dim ||
      params.eps.embedding.size() != dim) {
    throw DataError(path.string() + ": model dimension does not match");
  }
  return params;
}

int RunLink(const LinkFlags &flags, std::ostream &out, std::ostream &err) {
  if (!flags.train && !flags.eval) {
    throw std::invalid_argument("link needs --train and/or --eval");
  }
  if (flags.train && flags.model.empty()) {
    throw std::invalid_argument("--train needs --model to store parameters");
  }
  auto wordpieces = std::make_shared<const EmbeddingSpace>(
      LoadSpace(flags.wp_space, SpaceKind::kWordpiece));
  auto entities = LoadEntities(flags.ent_space, flags.align);
  const int dim = wordpieces->dim();

  auto table = LoadCandidateTable(flags.table, flags.max_span);
  if (table.rejected() > 0) {
    err << "rejected " << table.rejected() << " table keys longer than "
        << flags.max_span << " tokens\n";
  }
  if (int dropped = table.RestrictTo(*entities); dropped > 0) {
    err << "dropped " << dropped << " candidates without entity vectors\n";
  }
  auto docs = LoadElDocuments(flags.docs);
  RedirectMap redirects;
  if (!flags.redirects.empty()) redirects = LoadRedirects(flags.redirects);

  LinkerParams params;
  if (!flags.train && !flags.model.empty() && fs::exists(flags.model)) {
    params = LoadLinkerParams(flags.model, dim);
  } else {
    if (flags.head_init == "identity") {
      params.head = AffineHead::Identity(dim);
    } else if (flags.head_init == "zero") {
      params.head = AffineHead::Zero(dim);
    } else {
      throw std::invalid_argument("--head-init must be identity or zero");
    }
    params.eps = NullEntityParams::Zero(dim);
    params.eps.bias = flags.null_bias;
  }
  MaskStyle style = flags.mask == "standard" ? MaskStyle::kStandardMask
                                             : MaskStyle::kEntityMask;
  if (flags.mask != "standard" && flags.mask != "entity") {
    throw std::invalid_argument("--mask must be entity or standard");
  }
  auto encoder = std::make_shared<const ReferenceEncoder>();
  LinkOptions options;
  options.max_span = flags.max_span;
  options.iterations = flags.iterations;
  options.threads = flags.threads;

  fs::create_directories(flags.out_dir);
  const fs::path dir(flags.out_dir);

  if (flags.train) {
    MlmSpanScorer scorer(wordpieces, entities, encoder, params, style);
    auto set = BuildTrainingSet(docs, table, scorer, wordpieces->vocab(),
                                redirects, options);
    err << "training on " << set.examples.size() << " spans, dropped "
        << set.dropped << " with out-of-candidate golds\n";
    TrainOptions train_options;
    train_options.epochs = flags.epochs;
    train_options.step_size = flags.step_size;
    auto trained = TrainLinker(set.examples, params, *entities, train_options);
    params = trained.params;
    SaveLinkerParams(params, flags.model);
    auto os = OpenFile(dir / "loss.tsv");
    os << "epoch\tloss\n";
    for (size_t i = 0; i < trained.losses.size(); ++i) {
      os << fmt::format("{}\t{:.9f}\n", i, trained.losses[i]);
    }
    out << fmt::format("train_examples\t{}\ndropped\t{}\ninitial_loss\t{:.9f}\n"
                       "final_loss\t{:.9f}\n",
                       set.examples.size(), set.dropped,
                       trained.losses.front(), trained.losses.back());
  }

  if (flags.eval) {
    MlmSpanScorer scorer(wordpieces, entities, encoder, params, style);
    std::vector<std::vector<EntityAnnotation>> predictions, golds;
    auto pred_out = OpenFile(dir / "predictions.jsonl");
    auto iter_out = OpenFile(dir / "iterations.tsv");
    iter_out << "doc_id\titeration\tm\tn\tk\tcommitted\n";
    for (const auto &doc : docs) {
      auto links = LinkDocument(doc, table, scorer, wordpieces->vocab(), options);
      for (const auto &span : links.spans) {
        if (span.state != SpanState::kDecoded) continue;
        json record;
        record["doc_id"] = doc.doc_id;
        record["start"] = span.start;
        record["end"] = span.end;
        record["entity"] = span.entity;
        record["url"] = EntitySymbolToUrl(span.entity);
        record["confidence"] = span.confidence;
        pred_out << record.dump() << '\n';
      }
      for (const auto &step : links.log) {
        iter_out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", doc.doc_id,
                                step.iteration, step.m, step.n, step.k,
                                step.committed.size());
      }
      predictions.push_back(links.predictions);
      golds.push_back(doc.golds);
    }
    auto report = StrongMatchF1(predictions, golds, redirects);
    auto os = OpenFile(dir / "report.tsv");
    os << "scope\tprecision\trecall\tf1\n";
    os << fmt::format("micro\t{:.6f}\t{:.6f}\t{:.6f}\n", report.micro.precision,
                      report.micro.recall, report.micro.f1);
    os << fmt::format("macro\t{:.6f}\t{:.6f}\t{:.6f}\n", report.macro.precision,
                      report.macro.recall, report.macro.f1);
    out << fmt::format("micro_f1\t{:.6f}\nmacro_f1\t{:.6f}\npredictions\t{}\n"
                       "golds\t{}\n",
                       report.micro.f1, report.macro.f1, report.predictions,
                       report.golds);
  }
  return kExitOk;
}

// -------------------------------------------------------------- resolve

struct ResolveFlags {
  std::string surfaces, endpoint, fixture, cache, out;
  double rate = 5.0;
  int timeout_ms = 10000;
  int attempts = 3;
};

int RunResolve(const ResolveFlags &flags, std::ostream &out, std::ostream &err) {
  std::shared_ptr<SparqlTransport> transport;
  if (!flags.fixture.empty()) {
    transport = FixtureTransport::FromFile(flags.fixture);
  } else {
    HttpTransportOptions options;
    if (!flags.endpoint.empty()) options.endpoint = flags.endpoint;
    options.requests_per_second = flags.rate;
    options.timeout = std::chrono::milliseconds(flags.timeout_ms);
    options.attempts = flags.attempts;
    transport = std::make_shared<HttpSparqlTransport>(options);
  }
  std::shared_ptr<ResolutionCache> cache;
  if (!flags.cache.empty()) cache = std::make_shared<ResolutionCache>(flags.cache);
  WikidataClient client(transport, cache);

  Output output(flags.out, out);
  auto &os = output.stream();
  std::map<ResolutionStatus, int> counts;
  for (const auto &surface : ReadLines(flags.surfaces)) {
    auto result = client.Resolve(surface);
    ++counts[result.status];
    os << result.surface << '\t' << result.qid.value_or("") << '\t'
       << result.wikipedia_url.value_or("") << '\t' << StatusName(result.status)
       << '\n';
  }
  for (const auto &[status, count] : counts) {
    err << StatusName(status) << '\t' << count << '\n';
  }
  return counts.count(ResolutionStatus::kEndpointError) ? kExitEndpoint : kExitOk;
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Entity-enhanced masked LM toolkit: alignment, LAMA probing, "
               "LAMA-UHN filtering, entity linking and Wikidata resolution"};
  app.require_subcommand(1);
  GlobalFlags global;
  app.add_option("--seed", global.seed, "Seed for randomized procedures");
  app.add_flag("-v,--verbose", global.verbosity, "More logging");

  AlignFlags align;
  auto *align_cmd = app.add_subcommand("align", "Fit the alignment map");
  align_cmd->add_option("--src", align.src, "Word/entity space (word2vec text)")
      ->required();
  align_cmd->add_option("--tgt", align.tgt, "Wordpiece space (word2vec text)")
      ->required();
  align_cmd->add_option("--out", align.out, "Alignment output file")->required();
  align_cmd->add_option("--entities-out", align.entities_out,
                        "Also write the aligned entity space");
  align_cmd->add_option("--report", align.report, "Report file (default stdout)");
  align_cmd->add_flag("--l2-normalize", align.l2_normalize,
                      "Unit-normalize vectors before fitting");

  SynthFlags synth;
  auto *synth_cmd = app.add_subcommand(
      "synth-align", "Write a noiseless synthetic alignment fixture");
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();
  synth_cmd->add_option("--dim", synth.dim);
  synth_cmd->add_option("--target-dim", synth.target_dim);
  synth_cmd->add_option("--words", synth.words);
  synth_cmd->add_option("--entities", synth.entities);

  EvalFlags eval;
  auto *eval_cmd = app.add_subcommand("eval-lama", "Hits@k on cloze probes");
  eval_cmd->add_option("--data", eval.data, "JSON-lines file or directory")
      ->required();
  eval_cmd->add_option("--templates", eval.templates)->required();
  eval_cmd->add_option("--wp-space", eval.wp_space)->required();
  eval_cmd->add_option("--ent-space", eval.ent_space,
                       "Word/entity space the alignment maps from")
      ->required();
  eval_cmd->add_option("--align", eval.align)->required();
  eval_cmd->add_option("--mode", eval.mode, "bert, concat or replace");
  eval_cmd->add_option("--k", eval.k);
  eval_cmd->add_option("--resolutions", eval.resolutions,
                       "Surface resolution TSV (surface, qid, url)");
  eval_cmd->add_option("--answer-vocab", eval.answer_vocab,
                       "One answer per line (default: all gold answers)");
  eval_cmd->add_option("--stage", eval.stage, "Stage label for the TSV");
  eval_cmd->add_option("--out", eval.out, "TSV output (default stdout)");
  eval_cmd->add_option("--threads", eval.threads);

  FilterFlags filter;
  auto *filter_cmd = app.add_subcommand("filter-uhn", "Build LAMA-UHN");
  filter_cmd->add_option("--data", filter.data)->required();
  filter_cmd->add_option("--templates", filter.templates)->required();
  filter_cmd->add_option("--out-dir", filter.out_dir)->required();
  filter_cmd->add_option("--wp-space", filter.wp_space,
                         "Wordpiece space used for the name probes")
      ->required();
  filter_cmd->add_option("--answer-vocab", filter.answer_vocab);
  filter_cmd->add_option("--top-k", filter.top_k);
  filter_cmd->add_flag("--case-insensitive", filter.case_insensitive);
  filter_cmd->add_option("--threads", filter.threads);

  LinkFlags link;
  auto *link_cmd = app.add_subcommand("link", "Entity linking");
  link_cmd->add_option("--docs", link.docs)->required();
  link_cmd->add_option("--table", link.table)->required();
  link_cmd->add_option("--redirects", link.redirects);
  link_cmd->add_option("--wp-space", link.wp_space)->required();
  link_cmd->add_option("--ent-space", link.ent_space)->required();
  link_cmd->add_option("--align", link.align)->required();
  link_cmd->add_option("--model", link.model, "Linker parameters (JSON)");
  link_cmd->add_option("--out-dir", link.out_dir)->required();
  link_cmd->add_flag("--train", link.train);
  link_cmd->add_flag("--eval", link.eval);
  link_cmd->add_option("--iterations", link.iterations);
  link_cmd->add_option("--epochs", link.epochs);
  link_cmd->add_option("--lr", link.step_size);
  link_cmd->add_option("--head-init", link.head_init, "identity or zero");
  link_cmd->add_option("--null-bias", link.null_bias);
  link_cmd->add_option("--mask", link.mask, "entity or standard");
  link_cmd->add_option("--max-span", link.max_span);
  link_cmd->add_option("--threads", link.threads);

  ResolveFlags resolve;
  auto *resolve_cmd = app.add_subcommand("resolve", "Surface forms to Wikidata");
  resolve_cmd->add_option("--surfaces", resolve.surfaces)->required();
  auto *endpoint_opt = resolve_cmd->add_option(
      "--endpoint", resolve.endpoint,
      fmt::format("SPARQL endpoint (default ${} or {})", kEndpointEnvVar,
                  kDefaultSparqlEndpoint));
  auto *fixture_opt =
      resolve_cmd->add_option("--fixture", resolve.fixture, "Canned answers");
  endpoint_opt->excludes(fixture_opt);
  resolve_cmd->add_option("--cache", resolve.cache);
  resolve_cmd->add_option("--out", resolve.out);
  resolve_cmd->add_option("--rate", resolve.rate, "Requests per second");
  resolve_cmd->add_option("--timeout-ms", resolve.timeout_ms);
  resolve_cmd->add_option("--attempts", resolve.attempts);

  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*align_cmd) return RunAlign(align, out);
    if (*synth_cmd) return RunSynthAlign(synth, global, out);
    if (*eval_cmd) return RunEvalLama(eval, out, err);
    if (*filter_cmd) return RunFilterUhn(filter, out, err);
    if (*link_cmd) return RunLink(link, out, err);
    if (*resolve_cmd) return RunResolve(resolve, out, err);
  } catch (const EndpointError &e) {
    err << "error: " << e.what() << '\n';
    return kExitEndpoint;
  } catch (const DataError &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ebert::cli

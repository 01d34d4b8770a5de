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

// Surface form -> Wikidata id -> English Wikipedia URL resolution over a
// SPARQL endpoint.
//
// Two queries are issued: an rdfs:label lookup for the surface form as an
// English label, and a schema:about lookup for the en.wikipedia.org
// sitelink of the chosen id. When several ids share a label the
// numerically lowest one wins.

#ifndef EBERT_WIKIDATA_CLIENT_H_
#define EBERT_WIKIDATA_CLIENT_H_

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ebert {

inline constexpr std::string_view kDefaultSparqlEndpoint =
    "https://query.wikidata.org/sparql";
inline constexpr const char *kEndpointEnvVar = "EBERT_SPARQL_ENDPOINT";

// $EBERT_SPARQL_ENDPOINT if set, else the public Wikidata endpoint.
std::string DefaultSparqlEndpoint();

enum class ResolutionStatus {
  kResolved,
  kAmbiguousResolvedLowest,
  kNotFound,
  kEndpointError,
};

std::string_view StatusName(ResolutionStatus status);

struct ResolutionResult {
  std::string surface;
  std::optional<std::string> qid;
  std::optional<std::string> wikipedia_url;
  ResolutionStatus status = ResolutionStatus::kNotFound;
};

bool IsValidQid(std::string_view qid);
// Integer suffix of a valid id ("Q42" -> 42).
long long QidNumber(std::string_view qid);

std::string LabelQuery(std::string_view surface);
// Throws std::invalid_argument for a malformed id.
std::string SitelinkQuery(std::string_view qid);

// Ids bound to ?id in a SPARQL JSON result, deduplicated, ascending by
// number. Throws EndpointError on malformed JSON.
std::vector<std::string> ParseIdBindings(std::string_view body);
// URLs bound to ?wikiurl that point at en.wikipedia.org, sorted.
std::vector<std::string> ParseUrlBindings(std::string_view body);

struct SparqlResponse {
  int status = 0;
  std::string body;
};

// Executes a SPARQL SELECT and returns the JSON results document.
// Implementations throw EndpointError when the endpoint cannot be reached.
class SparqlTransport {
 public:
  virtual ~SparqlTransport() = default;
  virtual SparqlResponse Execute(const std::string &query) = 0;
};

// Spaces calls at least 1/rate seconds apart. Thread-safe.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void Acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
};

struct HttpTransportOptions {
  std::string endpoint = DefaultSparqlEndpoint();
  std::string user_agent = "ebert-tools/1.0 (entity resolution)";
  std::chrono::milliseconds timeout{10000};
  int attempts = 3;
  std::chrono::milliseconds backoff{500};  // doubled after every failure
  double requests_per_second = 5.0;
};

// SPARQL-over-HTTP GET with JSON results, retrying connection failures,
// 429 and 5xx answers.
class HttpSparqlTransport : public SparqlTransport {
 public:
  explicit HttpSparqlTransport(HttpTransportOptions options = {});
  SparqlResponse Execute(const std::string &query) override;

 private:
  HttpTransportOptions options_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
  RateLimiter limiter_;
};

// Canned answers keyed by exact query text. Unknown queries return an empty
// result set.
class FixtureTransport : public SparqlTransport {
 public:
  FixtureTransport() = default;

  void AddResponse(std::string query, std::string body);
  // Canned label hits and sitelinks, rendered as SPARQL JSON results.
  void AddLabel(std::string_view surface, const std::vector<std::string> &qids);
  void AddSitelink(std::string_view qid, std::string_view url);
  // Every request fails as if the endpoint were down.
  void SetUnavailable(bool unavailable) { unavailable_ = unavailable; }

  // {"labels": {surface: [qid...]}, "sitelinks": {qid: url},
  //  "unavailable": bool}
  static std::unique_ptr<FixtureTransport> FromFile(
      const std::filesystem::path &path);

  SparqlResponse Execute(const std::string &query) override;
  int requests() const { return requests_; }

 private:
  std::map<std::string, std::string> responses_;
  bool unavailable_ = false;
  int requests_ = 0;
};

// On-disk TSV cache "surface<TAB>qid<TAB>url"; an empty qid records a
// surface that was not found. New entries are appended as they arrive so
// an interrupted batch resumes where it stopped.
class ResolutionCache {
 public:
  ResolutionCache() = default;
  explicit ResolutionCache(const std::filesystem::path &path);

  std::optional<ResolutionResult> Find(const std::string &surface) const;
  // Endpoint errors are never cached.
  void Put(const ResolutionResult &result);
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, ResolutionResult> entries_;
  std::ofstream out_;
};

class WikidataClient {
 public:
  explicit WikidataClient(std::shared_ptr<SparqlTransport> transport,
                          std::shared_ptr<ResolutionCache> cache = nullptr);

  // Label lookup only; fills qid and status.
  ResolutionResult ResolveSurface(const std::string &surface);
  // Sitelink lookup. Throws EndpointError on transport failure.
  std::optional<std::string> WikipediaUrl(const std::string &qid);
  // Both lookups, consulting and filling the cache.
  ResolutionResult Resolve(const std::string &surface);

 private:
  std::string Fetch(const std::string &query);

  std::shared_ptr<SparqlTransport> transport_;
  std::shared_ptr<ResolutionCache> cache_;
};

std::string PercentDecode(std::string_view text);
std::string PercentEncode(std::string_view text);

// "https://en.wikipedia.org/wiki/Battleground_%28film%29" ->
// "ENTITY/Battleground_(film)". Throws DataError for other hosts.
std::string UrlToEntitySymbol(std::string_view url);
std::string EntitySymbolToUrl(std::string_view symbol);

// Accepts either form and returns the entity symbol.
std::string NormalizeEntity(std::string_view url_or_symbol);

}  // namespace ebert

#endif  // EBERT_WIKIDATA_CLIENT_H_

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

#include "ebert/wikidata_client.h"

// Eigen must be seen before httplib pulls in the system socket headers.
#include "ebert/embeddings.h"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <fmt/core.h>
#include <httplib.h>
#include <json.hpp>

#include "ebert/error.h"

namespace ebert {
namespace {

using json = nlohmann::json;

constexpr std::string_view kWikidataEntityPrefix =
    "http://www.wikidata.org/entity/";
constexpr std::string_view kWikipediaHost = "en.wikipedia.org";

std::string EscapeSparqlString(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '\\' || c == '\'') out += '\\';
    out += c;
  }
  return out;
}

json ParseResults(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("results") ||
      !doc["results"].contains("bindings") ||
      !doc["results"]["bindings"].is_array()) {
    throw EndpointError("malformed SPARQL JSON result");
  }
  return doc["results"]["bindings"];
}

std::string ResultsBody(const std::vector<std::string> &vars,
                        const std::vector<std::vector<std::string>> &rows) {
  json doc;
  doc["head"]["vars"] = vars;
  doc["results"]["bindings"] = json::array();
  for (const auto &row : rows) {
    json binding;
    for (size_t i = 0; i < vars.size(); ++i) {
      binding[vars[i]] = {{"type", "uri"}, {"value", row[i]}};
    }
    doc["results"]["bindings"].push_back(binding);
  }
  return doc.dump();
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool IsUnreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' ||
         c == '~';
}

}  // namespace

std::string DefaultSparqlEndpoint() {
  if (const char *env = std::getenv(kEndpointEnvVar); env && *env) return env;
  return std::string(kDefaultSparqlEndpoint);
}

std::string_view StatusName(ResolutionStatus status) {
  switch (status) {
    case ResolutionStatus::kResolved: return "resolved";
    case ResolutionStatus::kAmbiguousResolvedLowest:
      return "ambiguous_resolved_lowest";
    case ResolutionStatus::kNotFound: return "not_found";
    case ResolutionStatus::kEndpointError: return "endpoint_error";
  }
  return "endpoint_error";
}

bool IsValidQid(std::string_view qid) {
  if (qid.size() < 2 || qid.size() > 19 || qid[0] != 'Q' || qid[1] == '0') {
    return false;
  }
  return std::all_of(qid.begin() + 1, qid.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

long long QidNumber(std::string_view qid) {
  if (!IsValidQid(qid)) {
    throw std::invalid_argument("malformed Wikidata id: " + std::string(qid));
  }
  return std::stoll(std::string(qid.substr(1)));
}

std::string LabelQuery(std::string_view surface) {
  return fmt::format(
      "SELECT ?id ?str WHERE {{\n"
      "  ?id rdfs:label ?str .\n"
      "  VALUES ?str {{ '{}'@en }} .\n"
      "  FILTER((LANG(?str)) = 'en') .\n"
      "}}\n",
      EscapeSparqlString(surface));
}

std::string SitelinkQuery(std::string_view qid) {
  if (!IsValidQid(qid)) {
    throw std::invalid_argument("malformed Wikidata id: " + std::string(qid));
  }
  return fmt::format(
      "SELECT ?id ?wikiurl WHERE {{\n"
      "  VALUES ?id {{ wd:{} }} .\n"
      "  ?wikiurl schema:about ?id .\n"
      "  ?wikiurl schema:inLanguage 'en' .\n"
      "  FILTER REGEX(str(?wikiurl), '.*en.wikipedia.org.*') .\n"
      "}}\n",
      qid);
}

std::vector<std::string> ParseIdBindings(std::string_view body) {
  std::vector<std::string> ids;
  for (const auto &binding : ParseResults(body)) {
    if (!binding.contains("id")) continue;
    std::string value = binding["id"].value("value", "");
    auto slash = value.rfind('/');
    std::string qid = slash == std::string::npos ? value : value.substr(slash + 1);
    if (IsValidQid(qid)) ids.push_back(qid);
  }
  std::sort(ids.begin(), ids.end(), [](const auto &a, const auto &b) {
    return QidNumber(a) < QidNumber(b);
  });
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<std::string> ParseUrlBindings(std::string_view body) {
  std::vector<std::string> urls;
  for (const auto &binding : ParseResults(body)) {
    if (!binding.contains("wikiurl")) continue;
    std::string value = binding["wikiurl"].value("value", "");
    if (value.find(kWikipediaHost) != std::string::npos) urls.push_back(value);
  }
  std::sort(urls.begin(), urls.end());
  urls.erase(std::unique(urls.begin(), urls.end()), urls.end());
  return urls;
}

RateLimiter::RateLimiter(double requests_per_second)
    : interval_(requests_per_second > 0
                    ? std::chrono::duration_cast<
                          std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(1.0 /
                                                        requests_per_second))
                    : std::chrono::steady_clock::duration::zero()),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::Acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

HttpSparqlTransport::HttpSparqlTransport(HttpTransportOptions options)
    : options_(std::move(options)), limiter_(options_.requests_per_second) {
  const std::string &url = options_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint must be an http(s) URL: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  base_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

SparqlResponse HttpSparqlTransport::Execute(const std::string &query) {
  httplib::Client client(base_);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  httplib::Headers headers = {
      {"User-Agent", options_.user_agent},
      {"Accept", "application/sparql-results+json"},
  };
  std::string target =
      path_ + "?format=json&query=" + PercentEncode(query);

  std::string last_error = "no attempts made";
  auto backoff = options_.backoff;
  for (int attempt = 0; attempt < std::max(options_.attempts, 1); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    limiter_.Acquire();
    auto result = client.Get(target, headers);
    if (!result) {
      last_error = "request failed: " + httplib::to_string(result.error());
      continue;
    }
    int status = result->status;
    if (status == 429 || status >= 500) {
      last_error = fmt::format("HTTP {}", status);
      continue;
    }
    if (status != 200) {
      throw EndpointError(fmt::format("{} answered HTTP {}", options_.endpoint,
                                      status));
    }
    return {status, result->body};
  }
  throw EndpointError(options_.endpoint + ": " + last_error);
}

void FixtureTransport::AddResponse(std::string query, std::string body) {
  responses_[std::move(query)] = std::move(body);
}

void FixtureTransport::AddLabel(std::string_view surface,
                                const std::vector<std::string> &qids) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &qid : qids) {
    rows.push_back({std::string(kWikidataEntityPrefix) + qid,
                    std::string(surface)});
  }
  AddResponse(LabelQuery(surface), ResultsBody({"id", "str"}, rows));
}

void FixtureTransport::AddSitelink(std::string_view qid, std::string_view url) {
  AddResponse(SitelinkQuery(qid),
              ResultsBody({"id", "wikiurl"},
                          {{std::string(kWikidataEntityPrefix) +
                                std::string(qid),
                            std::string(url)}}));
}

std::unique_ptr<FixtureTransport> FixtureTransport::FromFile(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw DataError(path.string() + ": fixture must be a JSON object");
  }
  auto fixture = std::make_unique<FixtureTransport>();
  try {
    if (doc.contains("labels")) {
      for (const auto &[surface, qids] : doc["labels"].items()) {
        fixture->AddLabel(surface, qids.get<std::vector<std::string>>());
      }
    }
    if (doc.contains("sitelinks")) {
      for (const auto &[qid, url] : doc["sitelinks"].items()) {
        fixture->AddSitelink(qid, url.get<std::string>());
      }
    }
    fixture->SetUnavailable(doc.value("unavailable", false));
  } catch (const json::exception &e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument &e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return fixture;
}

SparqlResponse FixtureTransport::Execute(const std::string &query) {
  ++requests_;
  if (unavailable_) throw EndpointError("fixture endpoint unavailable");
  auto it = responses_.find(query);
  if (it != responses_.end()) return {200, it->second};
  return {200, ResultsBody({"id"}, {})};
}

ResolutionCache::ResolutionCache(const std::filesystem::path &path) {
  {
    std::ifstream in(path);
    std::string line;
    while (in && std::getline(in, line)) {
      if (line.empty()) continue;
      auto first = line.find('\t');
      auto second = first == std::string::npos ? first : line.find('\t', first + 1);
      if (second == std::string::npos) {
        throw DataError(path.string() + ": cache rows need 3 columns");
      }
      ResolutionResult r;
      r.surface = line.substr(0, first);
      std::string qid = line.substr(first + 1, second - first - 1);
      std::string url = line.substr(second + 1);
      if (!qid.empty()) {
        r.qid = qid;
        r.status = ResolutionStatus::kResolved;
      } else {
        r.status = ResolutionStatus::kNotFound;
      }
      if (!url.empty()) r.wikipedia_url = url;
      entries_[r.surface] = r;
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw DataError("cannot write cache " + path.string());
}

std::optional<ResolutionResult> ResolutionCache::Find(
    const std::string &surface) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(surface);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResolutionCache::Put(const ResolutionResult &result) {
  if (result.status == ResolutionStatus::kEndpointError) return;
  std::lock_guard<std::mutex> lock(mu_);
  entries_[result.surface] = result;
  if (out_.is_open()) {
    out_ << result.surface << '\t' << result.qid.value_or("") << '\t'
         << result.wikipedia_url.value_or("") << '\n';
    out_.flush();
  }
}

size_t ResolutionCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

WikidataClient::WikidataClient(std::shared_ptr<SparqlTransport> transport,
                               std::shared_ptr<ResolutionCache> cache)
    : transport_(std::move(transport)), cache_(std::move(cache)) {
  if (!transport_) throw std::invalid_argument("client needs a transport");
}

std::string WikidataClient::Fetch(const std::string &query) {
  SparqlResponse response = transport_->Execute(query);
  if (response.status != 200) {
    throw EndpointError(fmt::format("endpoint answered HTTP {}", response.status));
  }
  return response.body;
}

ResolutionResult WikidataClient::ResolveSurface(const std::string &surface) {
  if (surface.empty()) throw std::invalid_argument("empty surface form");
  ResolutionResult result;
  result.surface = surface;
  try {
    auto ids = ParseIdBindings(Fetch(LabelQuery(surface)));
    if (ids.empty()) {
      result.status = ResolutionStatus::kNotFound;
    } else {
      result.qid = ids.front();
      result.status = ids.size() == 1
                          ? ResolutionStatus::kResolved
                          : ResolutionStatus::kAmbiguousResolvedLowest;
    }
  } catch (const EndpointError &) {
    result.status = ResolutionStatus::kEndpointError;
  }
  return result;
}

std::optional<std::string> WikidataClient::WikipediaUrl(const std::string &qid) {
  auto urls = ParseUrlBindings(Fetch(SitelinkQuery(qid)));
  if (urls.empty()) return std::nullopt;
  return urls.front();
}

ResolutionResult WikidataClient::Resolve(const std::string &surface) {
  if (cache_) {
    if (auto hit = cache_->Find(surface)) return *hit;
  }
  ResolutionResult result = ResolveSurface(surface);
  if (result.qid) {
    try {
      result.wikipedia_url = WikipediaUrl(*result.qid);
    } catch (const EndpointError &) {
      result.status = ResolutionStatus::kEndpointError;
    }
  }
  if (cache_) cache_->Put(result);
  return result;
}

std::string PercentDecode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      int hi = HexValue(text[i + 1]);
      int lo = HexValue(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

std::string PercentEncode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (IsUnreserved(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string UrlToEntitySymbol(std::string_view url) {
  std::string_view rest = url;
  if (rest.starts_with("https://")) {
    rest.remove_prefix(8);
  } else if (rest.starts_with("http://")) {
    rest.remove_prefix(7);
  } else {
    throw DataError("not a Wikipedia URL: " + std::string(url));
  }
  auto slash = rest.find('/');
  std::string host(rest.substr(0, slash));
  std::transform(host.begin(), host.end(), host.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (host != kWikipediaHost || slash == std::string_view::npos) {
    throw DataError("not an en.wikipedia.org URL: " + std::string(url));
  }
  std::string_view path = rest.substr(slash);
  path = path.substr(0, path.find_first_of("?#"));
  std::string_view title;
  if (path.starts_with("/wiki/")) {
    title = path.substr(6);
  } else {
    title = path.substr(path.rfind('/') + 1);
  }
  if (title.empty()) {
    throw DataError("Wikipedia URL without a title: " + std::string(url));
  }
  return std::string(kEntityPrefix) + PercentDecode(title);
}

std::string EntitySymbolToUrl(std::string_view symbol) {
  if (!IsEntitySymbol(symbol)) {
    throw std::invalid_argument("not an entity symbol: " + std::string(symbol));
  }
  return "https://en.wikipedia.org/wiki/" +
         PercentEncode(symbol.substr(kEntityPrefix.size()));
}

std::string NormalizeEntity(std::string_view url_or_symbol) {
  if (IsEntitySymbol(url_or_symbol)) return std::string(url_or_symbol);
  return UrlToEntitySymbol(url_or_symbol);
}

}  // namespace ebert

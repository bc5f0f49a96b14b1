#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "http_util.hpp"
#include "sarf/digest.hpp"
#include "sarf/errors.hpp"
#include "sarf/sentiment.hpp"

namespace sarf {
namespace {

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalpha(c) || (c == '\'' && !cur.empty())) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

const std::vector<std::string> kPositiveWords = {
    "beat",     "beats",     "boost",     "bullish",  "exceed",   "exceeds",   "gain",   "gains",
    "growth",   "jump",      "jumps",     "optimism", "optimistic", "outperform", "profit", "profits",
    "rally",    "rallies",   "record",    "recovery", "rise",     "rises",     "robust", "rose",
    "soar",     "soars",     "strong",    "surge",    "surges",   "upgrade",   "upgraded"};

const std::vector<std::string> kNegativeWords = {
    "bearish", "concern",  "concerns", "crash",   "cut",    "cuts",    "decline",   "declines",
    "default", "downgrade", "downgraded", "drop", "drops",  "fall",    "falls",     "fear",
    "fears",   "fell",     "layoffs",  "loss",    "losses", "miss",    "misses",    "plunge",
    "plunges", "recession", "slump",   "warning", "weak"};

}  // namespace

LexiconProvider::LexiconProvider() : LexiconProvider(kPositiveWords, kNegativeWords) {}

LexiconProvider::LexiconProvider(std::vector<std::string> positive_words, std::vector<std::string> negative_words)
    : positive_(std::move(positive_words)), negative_(std::move(negative_words)) {
  std::sort(positive_.begin(), positive_.end());
  std::sort(negative_.begin(), negative_.end());
}

SentimentScore LexiconProvider::score(const NewsItem& item) const {
  const auto words = words_of(item.text);
  std::size_t pos = 0, neg = 0;
  for (const auto& w : words) {
    if (std::binary_search(positive_.begin(), positive_.end(), w)) {
      ++pos;
    } else if (std::binary_search(negative_.begin(), negative_.end(), w)) {
      ++neg;
    }
  }
  if (pos + neg == 0) return SentimentScore{0, 0, 1, 0};
  const double n = static_cast<double>(words.size());
  const double p = static_cast<double>(pos) / n;
  const double q = static_cast<double>(neg) / n;
  return SentimentScore{p, q, static_cast<double>(words.size() - pos - neg) / n, p - q};
}

FixtureProvider FixtureProvider::parse(std::string_view jsonl) {
  FixtureProvider provider;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    const std::string where = "fixture line " + std::to_string(line_no);
    if (!doc.is_object() || !doc.contains("hash") || !doc["hash"].is_string()) {
      throw DataError(where + ": expected {\"hash\", \"positive\", \"negative\", \"neutral\"}");
    }
    double probs[3];
    const char* keys[3] = {"positive", "negative", "neutral"};
    for (int k = 0; k < 3; ++k) {
      if (!doc.contains(keys[k]) || !doc[keys[k]].is_number()) {
        throw DataError(where + ": missing number '" + keys[k] + "'");
      }
      probs[k] = doc[keys[k]].get<double>();
    }
    try {
      provider.scores_[doc["hash"].get<std::string>()] =
          SentimentScore::from_probabilities(probs[0], probs[1], probs[2]);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return provider;
}

FixtureProvider FixtureProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open sentiment fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

SentimentScore FixtureProvider::score(const NewsItem& item) const {
  const auto hash = sha256_hex(item.text);
  const auto it = scores_.find(hash);
  if (it == scores_.end()) throw DataError("sentiment fixture has no score for text hash " + hash);
  return it->second;
}

HttpProvider::HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {
  detail::split_url(options_.endpoint);
}

SentimentScore HttpProvider::score(const NewsItem& item) const {
  const auto parts = detail::split_url(options_.endpoint);
  const std::string body = nlohmann::json{{"text", item.text}}.dump();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  std::string last_error;
  auto backoff = options_.retry_backoff;
  const int attempts = std::max(1, options_.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(parts.origin);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Post(parts.target, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
    } else {
      const auto doc = nlohmann::json::parse(res->body, nullptr, false);
      if (!doc.is_object()) throw DataError("sentiment endpoint returned non-JSON body");
      double probs[3];
      const char* keys[3] = {"positive", "negative", "neutral"};
      for (int k = 0; k < 3; ++k) {
        if (!doc.contains(keys[k]) || !doc[keys[k]].is_number()) {
          throw DataError(std::string("sentiment endpoint response missing '") + keys[k] + "'");
        }
        probs[k] = doc[keys[k]].get<double>();
      }
      return SentimentScore::from_probabilities(probs[0], probs[1], probs[2]);
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw NetworkError("sentiment endpoint " + options_.endpoint + " failed after " + std::to_string(attempts) +
                     " attempts: " + last_error);
}

}  // namespace sarf

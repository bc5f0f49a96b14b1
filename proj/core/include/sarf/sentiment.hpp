#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sarf/date.hpp"

namespace sarf {

struct NewsItem {
  Instant timestamp;
  std::string text;    // non-empty
  std::string symbol;  // empty when the item is market-wide
};

struct SentimentScore {
  double positive = 0;
  double negative = 0;
  double neutral = 1;
  double composite = 0;  // positive - negative

  // Validates raw class probabilities. Sums within 1e-9 of one are accepted
  // as-is; sums in [0.99, 1.01] are renormalized; anything else throws DataError.
  static SentimentScore from_probabilities(double positive, double negative, double neutral);
};

struct DailySentiment {
  Date date;
  double mean_positive = 0;
  double mean_negative = 0;
  double mean_neutral = 1;
  double mean_composite = 0;
  std::size_t article_count = 0;
};

// Column names of the four daily features, in frame order.
inline constexpr std::string_view kSentimentColumns[4] = {
    "sent_positive", "sent_negative", "sent_neutral", "sent_composite"};

class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  // Must be safe to call concurrently.
  virtual SentimentScore score(const NewsItem& item) const = 0;
};

// Word-count test double. positive = hits / words, same for negative.
class LexiconProvider final : public SentimentProvider {
 public:
  LexiconProvider();
  LexiconProvider(std::vector<std::string> positive_words, std::vector<std::string> negative_words);
  SentimentScore score(const NewsItem& item) const override;

 private:
  std::vector<std::string> positive_;
  std::vector<std::string> negative_;
};

// Looks up scores by sha256_hex(text) in a JSON-lines file of
// {"hash": ..., "positive": x, "negative": y, "neutral": z}.
class FixtureProvider final : public SentimentProvider {
 public:
  static FixtureProvider load(const std::filesystem::path& path);
  static FixtureProvider parse(std::string_view jsonl);
  SentimentScore score(const NewsItem& item) const override;
  std::size_t size() const { return scores_.size(); }

 private:
  std::unordered_map<std::string, SentimentScore> scores_;
};

struct HttpProviderOptions {
  std::string endpoint;  // http(s)://host[:port]/path
  std::chrono::milliseconds timeout{10000};
  int max_attempts = 3;
  std::chrono::milliseconds retry_backoff{500};
};

// POSTs {"text": ...} and expects {"positive","negative","neutral"}.
// Throws NetworkError after the final failed attempt.
class HttpProvider final : public SentimentProvider {
 public:
  explicit HttpProvider(HttpProviderOptions options);
  SentimentScore score(const NewsItem& item) const override;

 private:
  HttpProviderOptions options_;
};

std::vector<NewsItem> parse_news_jsonl(std::string_view jsonl);
std::vector<NewsItem> read_news_jsonl(const std::filesystem::path& path);

// Items whose symbol is empty or equals `symbol`.
std::vector<NewsItem> filter_for_symbol(std::span<const NewsItem> items, std::string_view symbol);

struct ScoredItem {
  NewsItem item;
  SentimentScore score;
};

// Scores with at most `parallelism` concurrent provider calls; output order
// follows input order.
std::vector<ScoredItem> score_all(const SentimentProvider& provider, std::span<const NewsItem> items,
                                  unsigned parallelism = 1);

struct AggregationOptions {
  double decay = 0.9;  // in [0, 1]
  // Session close, UTC time of day. News after the previous session's close
  // and at or before this day's close belongs to this day.
  std::chrono::seconds close_utc = std::chrono::hours(21);
};

// One DailySentiment per calendar day. Days without news carry the previous
// day's positive/negative/composite means times `decay` with neutral taking
// the remaining mass; leading days without news are neutral.
std::vector<DailySentiment> aggregate_daily(std::span<const ScoredItem> items,
                                            std::span<const Date> calendar,
                                            AggregationOptions options = {});

}  // namespace sarf

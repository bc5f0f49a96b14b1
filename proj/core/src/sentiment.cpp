#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "parallel.hpp"
#include "sarf/errors.hpp"
#include "sarf/sentiment.hpp"

namespace sarf {

SentimentScore SentimentScore::from_probabilities(double positive, double negative, double neutral) {
  for (double p : {positive, negative, neutral}) {
    if (!std::isfinite(p) || p < 0) throw DataError("sentiment probabilities must be finite and >= 0");
  }
  const double sum = positive + negative + neutral;
  if (std::abs(sum - 1.0) > 1e-9) {
    if (sum < 0.99 || sum > 1.01) {
      throw DataError("sentiment probabilities sum to " + std::to_string(sum) + ", outside [0.99, 1.01]");
    }
    positive /= sum;
    negative /= sum;
    neutral /= sum;
  }
  return SentimentScore{positive, negative, neutral, positive - negative};
}

std::vector<NewsItem> parse_news_jsonl(std::string_view jsonl) {
  std::vector<NewsItem> items;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "news line " + std::to_string(line_no);
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (!doc.is_object()) throw DataError(where + ": not a JSON object");
    const auto ts = doc.find("timestamp");
    const auto text = doc.find("text");
    if (ts == doc.end() || !ts->is_string()) throw DataError(where + ": missing string 'timestamp'");
    if (text == doc.end() || !text->is_string() || text->get<std::string>().empty()) {
      throw DataError(where + ": 'text' must be a non-empty string");
    }
    NewsItem item;
    try {
      item.timestamp = parse_instant(ts->get<std::string>());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    item.text = text->get<std::string>();
    if (auto sym = doc.find("symbol"); sym != doc.end() && sym->is_string()) item.symbol = sym->get<std::string>();
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<NewsItem> read_news_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_news_jsonl(ss.str());
}

std::vector<NewsItem> filter_for_symbol(std::span<const NewsItem> items, std::string_view symbol) {
  std::vector<NewsItem> out;
  for (const auto& item : items) {
    if (item.symbol.empty() || item.symbol == symbol) out.push_back(item);
  }
  return out;
}

std::vector<ScoredItem> score_all(const SentimentProvider& provider, std::span<const NewsItem> items,
                                  unsigned parallelism) {
  std::vector<ScoredItem> out(items.size());
  detail::parallel_for(items.size(), parallelism, [&](std::size_t i) {
    out[i] = ScoredItem{items[i], provider.score(items[i])};
  });
  return out;
}

std::vector<DailySentiment> aggregate_daily(std::span<const ScoredItem> items, std::span<const Date> calendar,
                                            AggregationOptions options) {
  if (calendar.empty()) throw DataError("aggregate_daily: empty calendar");
  if (!(options.decay >= 0.0 && options.decay <= 1.0)) throw std::invalid_argument("decay must be in [0, 1]");
  std::vector<Instant> closes;
  closes.reserve(calendar.size());
  for (std::size_t i = 0; i < calendar.size(); ++i) {
    if (i > 0 && !(calendar[i - 1] < calendar[i])) throw DataError("calendar dates must be strictly increasing");
    closes.push_back(Instant(calendar[i].sys_days()) + options.close_utc);
  }
  const Instant first_open = closes.front() - std::chrono::days(1);

  std::vector<std::vector<const SentimentScore*>> by_day(calendar.size());
  for (const auto& s : items) {
    if (s.item.timestamp <= first_open) continue;
    const auto it = std::lower_bound(closes.begin(), closes.end(), s.item.timestamp);
    if (it == closes.end()) continue;
    by_day[static_cast<std::size_t>(it - closes.begin())].push_back(&s.score);
  }

  std::vector<DailySentiment> out;
  out.reserve(calendar.size());
  DailySentiment prev;  // neutral
  for (std::size_t d = 0; d < calendar.size(); ++d) {
    auto& scores = by_day[d];
    DailySentiment day;
    day.date = calendar[d];
    day.article_count = scores.size();
    if (scores.empty()) {
      day.mean_positive = prev.mean_positive * options.decay;
      day.mean_negative = prev.mean_negative * options.decay;
      day.mean_neutral = 1.0 - day.mean_positive - day.mean_negative;
      day.mean_composite = prev.mean_composite * options.decay;
    } else {
      // Canonical order makes the floating-point sums independent of input order.
      std::sort(scores.begin(), scores.end(), [](const SentimentScore* a, const SentimentScore* b) {
        return std::tie(a->positive, a->negative, a->neutral) < std::tie(b->positive, b->negative, b->neutral);
      });
      double pos = 0, neg = 0, neu = 0, comp = 0;
      for (const auto* s : scores) {
        pos += s->positive;
        neg += s->negative;
        neu += s->neutral;
        comp += s->composite;
      }
      const double n = static_cast<double>(scores.size());
      day.mean_positive = pos / n;
      day.mean_negative = neg / n;
      day.mean_neutral = neu / n;
      day.mean_composite = std::clamp(comp / n, -1.0, 1.0);
    }
    out.push_back(day);
    prev = day;
  }
  return out;
}

}  // namespace sarf

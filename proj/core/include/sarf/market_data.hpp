#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sarf/date.hpp"

namespace sarf {

struct Bar {
  Date date;
  double open = 0;
  double high = 0;
  double low = 0;
  double close = 0;
  double volume = 0;

  friend bool operator==(const Bar&, const Bar&) = default;
};

// Returns the name of the first violated Bar rule, or nullopt when valid.
std::optional<std::string> check_bar(const Bar& bar);

// Daily bars for one symbol, strictly increasing by date. Never empty.
class BarSeries {
 public:
  // Validates every bar and the date order; throws DataError.
  BarSeries(std::string symbol, std::vector<Bar> bars);

  const std::string& symbol() const { return symbol_; }
  std::span<const Bar> bars() const { return bars_; }
  std::size_t size() const { return bars_.size(); }
  const Bar& operator[](std::size_t i) const { return bars_[i]; }

  std::vector<Date> dates() const;
  std::vector<double> closes() const;

  friend bool operator==(const BarSeries&, const BarSeries&) = default;

 private:
  std::string symbol_;
  std::vector<Bar> bars_;
};

// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

// CSV with header `date,open,high,low,close,volume`. Rows may come in any
// order; the result is sorted ascending. Errors name the 1-based line.
BarSeries parse_bars_csv(std::string_view text, std::string symbol = {});
std::string serialize_bars_csv(const BarSeries& series);

BarSeries read_bars_csv(const std::filesystem::path& path, std::string symbol = {});
void write_bars_csv(const BarSeries& series, const std::filesystem::path& path);

// ---- Alpha Vantage ----------------------------------------------------------

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Performs an HTTP GET on `url`. Throws NetworkError on transport failure.
using HttpGet = std::function<HttpResponse(const std::string& url)>;

// Default transport backed by cpp-httplib (https supported).
HttpGet make_http_get(std::chrono::seconds timeout = std::chrono::seconds(30));

struct AlphaVantageOptions {
  std::string base_url = "https://www.alphavantage.co";
  // Minimum delay between consecutive requests from one client.
  std::chrono::milliseconds min_request_interval{13000};
  // Total attempts when the API answers with a rate-limit note.
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{15000};
};

struct FetchResult {
  BarSeries series;
  // Remote call failed and the cache was served instead.
  bool stale = false;
  std::string warning;
};

// Sequential client. Not thread-safe: rate limiting assumes one caller.
class AlphaVantageClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  AlphaVantageClient(std::string api_key, AlphaVantageOptions options = {},
                     HttpGet transport = {}, Sleeper sleeper = {});

  std::string daily_url(std::string_view symbol) const;

  // One TIME_SERIES_DAILY request with rate-limit retries. Throws NetworkError
  // for transport failures and API error payloads, DataError for malformed bars.
  BarSeries fetch_daily_remote(const std::string& symbol);

  // Remote fetch that refreshes `<cache_dir>/<SYMBOL>.csv`; falls back to the
  // cache (stale = true) when the remote call fails.
  FetchResult fetch_daily(const std::string& symbol, const std::filesystem::path& cache_dir);

 private:
  void pace();

  std::string api_key_;
  AlphaVantageOptions options_;
  HttpGet transport_;
  Sleeper sleeper_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
};

// Parses a TIME_SERIES_DAILY JSON document. Throws NetworkError for
// "Error Message"/"Note"/"Information" payloads, DataError for missing fields.
BarSeries parse_alpha_vantage_daily(std::string_view json_text, std::string symbol);

// True when the payload is the API's rate-limit notice.
bool is_rate_limit_payload(std::string_view json_text);

std::filesystem::path cache_path(const std::filesystem::path& cache_dir, std::string_view symbol);

}  // namespace sarf

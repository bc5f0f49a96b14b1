#include <httplib.h>

#include <cctype>
#include <filesystem>
#include <json.hpp>
#include <thread>

#include "http_util.hpp"
#include "sarf/errors.hpp"
#include "sarf/market_data.hpp"

namespace sarf {
namespace detail {

SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos ||
      (url.substr(0, scheme_end) != "http" && url.substr(0, scheme_end) != "https")) {
    throw DataError("unsupported URL '" + std::string(url) + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

}  // namespace detail

namespace {

using nlohmann::json;

double field_number(const json& day, const char* key, const std::string& date) {
  const auto it = day.find(key);
  if (it == day.end()) throw DataError("Alpha Vantage bar " + date + " missing field '" + key + "'");
  try {
    if (it->is_string()) return std::stod(it->get<std::string>());
    if (it->is_number()) return it->get<double>();
  } catch (const std::exception&) {
  }
  throw DataError("Alpha Vantage bar " + date + " has unparsable '" + key + "'");
}

bool mentions_rate_limit(std::string text) {
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return text.find("rate limit") != std::string::npos || text.find("call frequency") != std::string::npos ||
         text.find("requests per") != std::string::npos;
}

}  // namespace

bool is_rate_limit_payload(std::string_view json_text) {
  const json doc = json::parse(json_text, nullptr, false);
  if (!doc.is_object()) return false;
  if (doc.contains("Note")) return true;
  if (auto it = doc.find("Information"); it != doc.end() && it->is_string()) {
    return mentions_rate_limit(it->get<std::string>());
  }
  return false;
}

BarSeries parse_alpha_vantage_daily(std::string_view json_text, std::string symbol) {
  const json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw DataError("Alpha Vantage response is not a JSON object");
  for (const char* key : {"Error Message", "Note", "Information"}) {
    if (auto it = doc.find(key); it != doc.end()) {
      throw NetworkError("Alpha Vantage: " + (it->is_string() ? it->get<std::string>() : it->dump()));
    }
  }
  const auto series = doc.find("Time Series (Daily)");
  if (series == doc.end() || !series->is_object()) {
    throw DataError("Alpha Vantage response missing 'Time Series (Daily)'");
  }
  std::vector<Bar> bars;
  bars.reserve(series->size());
  for (const auto& [date, day] : series->items()) {
    Bar b;
    b.date = Date::parse(date);
    b.open = field_number(day, "1. open", date);
    b.high = field_number(day, "2. high", date);
    b.low = field_number(day, "3. low", date);
    b.close = field_number(day, "4. close", date);
    b.volume = field_number(day, "5. volume", date);
    bars.push_back(b);
  }
  // nlohmann::json objects iterate in key order, so ISO dates come out ascending.
  return BarSeries(std::move(symbol), std::move(bars));
}

HttpGet make_http_get(std::chrono::seconds timeout) {
  return [timeout](const std::string& url) {
    const auto parts = detail::split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_follow_location(true);
    auto res = client.Get(parts.target);
    if (!res) throw NetworkError("GET " + parts.origin + " failed: " + httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
  };
}

AlphaVantageClient::AlphaVantageClient(std::string api_key, AlphaVantageOptions options, HttpGet transport,
                                       Sleeper sleeper)
    : api_key_(std::move(api_key)),
      options_(std::move(options)),
      transport_(transport ? std::move(transport) : make_http_get()),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](auto d) { std::this_thread::sleep_for(d); })) {}

std::string AlphaVantageClient::daily_url(std::string_view symbol) const {
  return options_.base_url + "/query?function=TIME_SERIES_DAILY&symbol=" + detail::url_encode(symbol) +
         "&outputsize=full&apikey=" + detail::url_encode(api_key_);
}

void AlphaVantageClient::pace() {
  const auto now = std::chrono::steady_clock::now();
  if (last_request_) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(now - *last_request_);
    if (elapsed < options_.min_request_interval) sleeper_(options_.min_request_interval - elapsed);
  }
  last_request_ = std::chrono::steady_clock::now();
}

BarSeries AlphaVantageClient::fetch_daily_remote(const std::string& symbol) {
  auto backoff = options_.initial_backoff;
  const int attempts = std::max(1, options_.max_attempts);
  for (int attempt = 1;; ++attempt) {
    pace();
    const HttpResponse res = transport_(daily_url(symbol));
    if (res.status != 200) {
      throw NetworkError("Alpha Vantage HTTP status " + std::to_string(res.status));
    }
    if (is_rate_limit_payload(res.body) && attempt < attempts) {
      sleeper_(backoff);
      backoff *= 2;
      continue;
    }
    return parse_alpha_vantage_daily(res.body, symbol);
  }
}

FetchResult AlphaVantageClient::fetch_daily(const std::string& symbol, const std::filesystem::path& cache_dir) {
  const auto path = cache_path(cache_dir, symbol);
  try {
    BarSeries series = fetch_daily_remote(symbol);
    write_bars_csv(series, path);
    return FetchResult{std::move(series), false, {}};
  } catch (const std::exception& remote_error) {
    if (!std::filesystem::exists(path)) throw;
    return FetchResult{read_bars_csv(path, symbol), true,
                       std::string("remote fetch failed (") + remote_error.what() + "); serving cached " +
                           path.string()};
  }
}

}  // namespace sarf

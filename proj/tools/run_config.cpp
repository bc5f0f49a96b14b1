#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>
#include <sstream>

#include "sarf/digest.hpp"
#include "sarf/errors.hpp"
#include "sarf/market_data.hpp"

namespace sarf::app {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw DataError("config " + std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::int64_t to_int(std::string_view key, std::string_view v, std::int64_t lo, std::int64_t hi) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw DataError("config " + std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
  if (out < lo || out > hi) {
    throw DataError("config " + std::string(key) + ": " + std::to_string(out) + " outside [" + std::to_string(lo) +
                    ", " + std::to_string(hi) + "]");
  }
  return out;
}

double in_range(std::string_view key, double v, double lo, double hi, bool lo_open, bool hi_open) {
  const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  if (!ok) {
    throw DataError("config " + std::string(key) + ": " + format_number(v) + " outside " + (lo_open ? "(" : "[") +
                    format_number(lo) + ", " + format_number(hi) + (hi_open ? ")" : "]"));
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw DataError("config " + std::string(key) + ": expected true or false");
}

struct Entry {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string quote(const std::string& s) { return "\"" + s + "\""; }

const std::map<std::string, Entry, std::less<>>& entries() {
  using R = RunConfig;
  using SV = std::string_view;
  static const std::map<std::string, Entry, std::less<>> table = {
      {"seed", {[](R& c, SV k, SV v) { c.seed = static_cast<std::uint64_t>(to_int(k, v, 0, INT64_MAX)); },
                [](const R& c) { return std::to_string(c.seed); }}},
      {"threads", {[](R& c, SV k, SV v) { c.threads = static_cast<unsigned>(to_int(k, v, 0, 1024)); },
                   [](const R& c) { return std::to_string(c.threads); }}},
      {"symbol", {[](R& c, SV, SV v) { c.symbol = v; }, [](const R& c) { return quote(c.symbol); }}},
      {"dataset.id", {[](R& c, SV, SV v) { c.dataset_id = v; }, [](const R& c) { return quote(c.dataset_id); }}},
      {"smoothing.alpha",
       {[](R& c, SV k, SV v) { c.smoothing_alpha = in_range(k, to_double(k, v), 0, 1, true, false); },
        [](const R& c) { return format_number(c.smoothing_alpha); }}},
      {"label.horizon",
       {[](R& c, SV k, SV v) { c.label_horizon = static_cast<std::size_t>(to_int(k, v, 1, 100000)); },
        [](const R& c) { return std::to_string(c.label_horizon); }}},
      {"sentiment.provider",
       {[](R& c, SV k, SV v) {
          if (v != "none" && v != "lexicon" && v != "fixture" && v != "http") {
            throw DataError("config " + std::string(k) + ": expected none, lexicon, fixture or http");
          }
          c.sentiment_provider = v;
        },
        [](const R& c) { return quote(c.sentiment_provider); }}},
      {"sentiment.decay",
       {[](R& c, SV k, SV v) { c.sentiment_decay = in_range(k, to_double(k, v), 0, 1, false, false); },
        [](const R& c) { return format_number(c.sentiment_decay); }}},
      {"sentiment.endpoint",
       {[](R& c, SV, SV v) { c.sentiment_endpoint = v; }, [](const R& c) { return quote(c.sentiment_endpoint); }}},
      {"sentiment.fixture",
       {[](R& c, SV, SV v) { c.sentiment_fixture = v; }, [](const R& c) { return quote(c.sentiment_fixture); }}},
      {"sentiment.parallelism",
       {[](R& c, SV k, SV v) { c.sentiment_parallelism = static_cast<unsigned>(to_int(k, v, 1, 256)); },
        [](const R& c) { return std::to_string(c.sentiment_parallelism); }}},
      {"sentiment.timeout_seconds",
       {[](R& c, SV k, SV v) { c.sentiment_timeout_seconds = in_range(k, to_double(k, v), 0, 3600, true, false); },
        [](const R& c) { return format_number(c.sentiment_timeout_seconds); }}},
      {"sentiment.retries",
       {[](R& c, SV k, SV v) { c.sentiment_retries = static_cast<int>(to_int(k, v, 1, 100)); },
        [](const R& c) { return std::to_string(c.sentiment_retries); }}},
      {"prune.threshold",
       {[](R& c, SV k, SV v) { c.prune_threshold = in_range(k, to_double(k, v), 0, 1, true, true); },
        [](const R& c) { return format_number(c.prune_threshold); }}},
      {"split.train_fraction",
       {[](R& c, SV k, SV v) { c.train_fraction = in_range(k, to_double(k, v), 0, 1, true, true); },
        [](const R& c) { return format_number(c.train_fraction); }}},
      {"pca.enabled", {[](R& c, SV k, SV v) { c.pca_enabled = to_bool(k, v); },
                       [](const R& c) { return std::string(c.pca_enabled ? "true" : "false"); }}},
      {"pca.variance_target",
       {[](R& c, SV k, SV v) { c.pca_variance_target = in_range(k, to_double(k, v), 0, 1, true, false); },
        [](const R& c) { return format_number(c.pca_variance_target); }}},
      {"ridge.lambda",
       {[](R& c, SV k, SV v) { c.ridge_lambda = in_range(k, to_double(k, v), 0, 1e300, false, false); },
        [](const R& c) { return format_number(c.ridge_lambda); }}},
      {"cv.folds", {[](R& c, SV k, SV v) { c.cv_folds = static_cast<std::size_t>(to_int(k, v, 2, 100)); },
                    [](const R& c) { return std::to_string(c.cv_folds); }}},
      {"search.trials", {[](R& c, SV k, SV v) { c.search_trials = static_cast<int>(to_int(k, v, 1, 100000)); },
                         [](const R& c) { return std::to_string(c.search_trials); }}},
      {"search.seed",
       {[](R& c, SV k, SV v) {
          if (v == "seed") {
            c.search_seed.reset();
          } else {
            c.search_seed = static_cast<std::uint64_t>(to_int(k, v, 0, INT64_MAX));
          }
        },
        [](const R& c) { return c.search_seed ? std::to_string(*c.search_seed) : quote("seed"); }}},
      {"forest.n_trees", {[](R& c, SV k, SV v) { c.forest.n_trees = static_cast<int>(to_int(k, v, 1, 100000)); },
                          [](const R& c) { return std::to_string(c.forest.n_trees); }}},
      {"forest.max_depth",
       {[](R& c, SV k, SV v) {
          c.forest.max_depth = v == "none" ? std::nullopt : std::optional<int>(static_cast<int>(to_int(k, v, 1, 10000)));
        },
        [](const R& c) { return c.forest.max_depth ? std::to_string(*c.forest.max_depth) : quote("none"); }}},
      {"forest.min_samples_split",
       {[](R& c, SV k, SV v) { c.forest.min_samples_split = static_cast<int>(to_int(k, v, 2, 1000000)); },
        [](const R& c) { return std::to_string(c.forest.min_samples_split); }}},
      {"forest.min_samples_leaf",
       {[](R& c, SV k, SV v) { c.forest.min_samples_leaf = static_cast<int>(to_int(k, v, 1, 1000000)); },
        [](const R& c) { return std::to_string(c.forest.min_samples_leaf); }}},
      {"forest.max_features",
       {[](R& c, SV k, SV v) {
          try {
            c.forest.max_features = MaxFeatures::parse(v);
          } catch (const std::invalid_argument& e) {
            throw DataError("config " + std::string(k) + ": " + e.what());
          }
        },
        [](const R& c) { return quote(c.forest.max_features.to_string()); }}},
      {"fetch.cache_dir",
       {[](R& c, SV, SV v) { c.fetch_cache_dir = v; }, [](const R& c) { return quote(c.fetch_cache_dir); }}},
      {"fetch.base_url",
       {[](R& c, SV, SV v) { c.fetch_base_url = v; }, [](const R& c) { return quote(c.fetch_base_url); }}},
      {"fetch.min_delay_seconds",
       {[](R& c, SV k, SV v) { c.fetch_min_delay_seconds = in_range(k, to_double(k, v), 0, 3600, false, false); },
        [](const R& c) { return format_number(c.fetch_min_delay_seconds); }}},
      {"fetch.max_attempts",
       {[](R& c, SV k, SV v) { c.fetch_max_attempts = static_cast<int>(to_int(k, v, 1, 100)); },
        [](const R& c) { return std::to_string(c.fetch_max_attempts); }}},
      {"input.bars", {[](R& c, SV, SV v) { c.input_bars = v; }, [](const R& c) { return quote(c.input_bars); }}},
      {"input.news", {[](R& c, SV, SV v) { c.input_news = v; }, [](const R& c) { return quote(c.input_news); }}},
      {"input.features",
       {[](R& c, SV, SV v) { c.input_features = v; }, [](const R& c) { return quote(c.input_features); }}},
      {"input.model", {[](R& c, SV, SV v) { c.input_model = v; }, [](const R& c) { return quote(c.input_model); }}},
      {"input.params", {[](R& c, SV, SV v) { c.input_params = v; }, [](const R& c) { return quote(c.input_params); }}},
      {"output.dir", {[](R& c, SV, SV v) { c.output_dir = v; }, [](const R& c) { return quote(c.output_dir); }}},
  };
  return table;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  if (key.starts_with("indicators.")) {
    const auto rest = key.substr(11);
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) throw DataError("config " + std::string(key) + ": expected indicators.<kind>.<param>");
    try {
      auto spec = default_spec(kind_from_key(rest.substr(0, dot)));
      const double v = to_double(key, value);
      spec.set_param(rest.substr(dot + 1), v);
      spec.validate();
      indicator_overrides[std::string(rest)] = v;
    } catch (const std::invalid_argument& e) {
      throw DataError("config " + std::string(key) + ": " + e.what());
    }
    return;
  }
  const auto it = entries().find(key);
  if (it == entries().end()) throw DataError("unknown config key '" + std::string(key) + "'");
  it->second.set(*this, key, value);
}

void RunConfig::validate() const {
  if (sentiment_provider == "http" && sentiment_endpoint.empty()) {
    throw DataError("config sentiment.provider = http requires sentiment.endpoint");
  }
  if (sentiment_provider == "fixture" && sentiment_fixture.empty()) {
    throw DataError("config sentiment.provider = fixture requires sentiment.fixture");
  }
  try {
    forest.validate();
    for (const auto& spec : indicator_specs()) spec.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
}

std::vector<IndicatorSpec> RunConfig::indicator_specs() const {
  auto specs = default_indicator_specs();
  for (const auto& [key, value] : indicator_overrides) {
    const auto dot = key.find('.');
    const auto kind = kind_from_key(key.substr(0, dot));
    for (auto& spec : specs) {
      if (spec.kind == kind) spec.set_param(key.substr(dot + 1), value);
    }
  }
  return specs;
}

SearchOptions RunConfig::search_options() const {
  SearchOptions o;
  o.n_trials = search_trials;
  o.folds = cv_folds;
  o.seed = search_seed.value_or(seed);
  return o;
}

TrainOptions RunConfig::train_options() const {
  TrainOptions o;
  o.workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  return o;
}

std::string RunConfig::canonical() const {
  std::vector<std::string> lines;
  for (const auto& [key, entry] : entries()) {
    // Paths and thread counts do not change results.
    if (key.starts_with("input.") || key == "output.dir" || key == "threads" || key == "fetch.cache_dir") continue;
    lines.push_back(key + " = " + entry.get(*this));
  }
  for (const auto& [key, value] : indicator_overrides) lines.push_back("indicators." + key + " = " + format_number(value));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string RunConfig::hash() const { return sha256_hex(canonical()); }

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      config.set(key, value);
    } catch (const DataError& e) {
      throw DataError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, entry] : entries()) out.push_back(key);
    out.push_back("indicators.<kind>.<param>");
    return out;
  }();
  return keys;
}

}  // namespace sarf::app

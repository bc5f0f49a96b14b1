#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sarf/evaluate.hpp"
#include "sarf/forest.hpp"
#include "sarf/indicators.hpp"

namespace sarf::app {

// Every tunable of a run. Loaded from a flat `key = value` file (a TOML
// subset: dotted keys, quoted or bare strings, numbers, booleans, `#`
// comments). Unknown keys and out-of-range values are rejected at load time.
struct RunConfig {
  std::uint64_t seed = 42;
  unsigned threads = 0;  // 0 = hardware concurrency

  std::string symbol;
  std::string dataset_id;

  double smoothing_alpha = 0.2;
  std::size_t label_horizon = 60;
  // "<kind>.<param>" -> value
  std::map<std::string, double> indicator_overrides;

  std::string sentiment_provider = "lexicon";  // none | lexicon | fixture | http
  double sentiment_decay = 0.9;
  std::string sentiment_endpoint;
  std::string sentiment_fixture;
  unsigned sentiment_parallelism = 4;
  double sentiment_timeout_seconds = 10;
  int sentiment_retries = 3;

  double prune_threshold = 0.8;
  double train_fraction = 0.6667;
  bool pca_enabled = false;
  double pca_variance_target = 0.95;
  double ridge_lambda = 1.0;

  std::size_t cv_folds = 3;
  int search_trials = 50;
  std::optional<std::uint64_t> search_seed;  // defaults to `seed`

  HyperParams forest;  // used by `train` without tuned parameters

  std::string fetch_cache_dir = "cache";
  std::string fetch_base_url = "https://www.alphavantage.co";
  double fetch_min_delay_seconds = 13;
  int fetch_max_attempts = 4;

  std::string input_bars;
  std::string input_news;
  std::string input_features;
  std::string input_model;
  std::string input_params;
  std::string output_dir;

  // Applies one key. Throws DataError for unknown keys or invalid values.
  void set(std::string_view key, std::string_view value);
  // Cross-field checks.
  void validate() const;

  std::vector<IndicatorSpec> indicator_specs() const;
  SearchOptions search_options() const;
  TrainOptions train_options() const;

  // Sorted `key = value` lines of the effective configuration.
  std::string canonical() const;
  std::string hash() const;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Every key understood by RunConfig::set (indicator keys as patterns).
const std::vector<std::string>& known_config_keys();

}  // namespace sarf::app

#include "commands.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include "json.hpp"

#include "run_config.hpp"
#include "sarf/digest.hpp"
#include "sarf/errors.hpp"
#include "sarf/evaluate.hpp"
#include "sarf/features.hpp"
#include "sarf/forest.hpp"
#include "sarf/indicators.hpp"
#include "sarf/market_data.hpp"
#include "sarf/preprocess.hpp"
#include "sarf/sentiment.hpp"
#include "sarf/synthetic.hpp"

namespace sarf::app {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp);
    out << text;
    if (!out) throw DataError("write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

std::string require_path(const std::string& value, const char* what) {
  if (value.empty()) throw CLI::ValidationError(std::string("missing ") + what);
  return value;
}

// Provenance block shared by every JSON artifact.
class Provenance {
 public:
  Provenance(const RunConfig& config, std::string command) : config_(config), command_(std::move(command)) {}

  void input(const std::string& role, const fs::path& path, const std::string& contents) {
    inputs_[role] = {{"file", path.filename().string()}, {"sha256", sha256_hex(contents)}};
  }

  json to_json() const {
    json inputs = json::object();
    for (const auto& [role, entry] : inputs_) inputs[role] = entry;
    return {{"tool", "sarf"},
            {"version", kToolVersion},
            {"command", command_},
            {"config_sha256", config_.hash()},
            {"seed", config_.seed},
            {"inputs", inputs}};
  }

  std::string attach(const std::string& artifact_json, int indent) const {
    json j = json::parse(artifact_json);
    j["provenance"] = to_json();
    return j.dump(indent) + "\n";
  }

 private:
  const RunConfig& config_;
  std::string command_;
  std::map<std::string, json> inputs_;
};

std::string dataset_id_for(const RunConfig& config, const fs::path& features) {
  return config.dataset_id.empty() ? features.stem().string() : config.dataset_id;
}

FeatureFrame load_frame(const fs::path& path, Provenance& provenance, const char* role) {
  const auto text = read_file(path);
  provenance.input(role, path, text);
  try {
    return parse_frame_csv(text);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::unique_ptr<SentimentProvider> make_provider(const RunConfig& config) {
  if (config.sentiment_provider == "lexicon") return std::make_unique<LexiconProvider>();
  if (config.sentiment_provider == "fixture") {
    return std::make_unique<FixtureProvider>(FixtureProvider::load(config.sentiment_fixture));
  }
  if (config.sentiment_provider == "http") {
    HttpProviderOptions options;
    options.endpoint = config.sentiment_endpoint;
    options.timeout = std::chrono::milliseconds(static_cast<long long>(config.sentiment_timeout_seconds * 1000));
    options.max_attempts = config.sentiment_retries;
    return std::make_unique<HttpProvider>(options);
  }
  return nullptr;
}

json prune_json(const PruneReport& report) {
  json dropped = json::array();
  for (const auto& d : report.dropped) {
    dropped.push_back({{"name", d.name}, {"partner", d.partner}, {"correlation", d.correlation}, {"reason", d.reason}});
  }
  return {{"threshold", report.threshold}, {"dropped", dropped}, {"kept", report.kept}};
}

// ---- fetch -------------------------------------------------------------------

struct FetchArgs {
  std::string symbol;
  std::string out;
  std::string api_key;
  std::string cache_dir;
  std::string base_url;
};

int cmd_fetch(const RunConfig& config, const FetchArgs& args, std::ostream& out, std::ostream& err) {
  const std::string symbol = args.symbol.empty() ? config.symbol : args.symbol;
  if (symbol.empty()) throw CLI::ValidationError("fetch needs --symbol or `symbol` in the config");
  std::string key = args.api_key;
  if (key.empty()) {
    if (const char* env = std::getenv("ALPHAVANTAGE_API_KEY")) key = env;
  }
  if (key.empty()) throw CLI::ValidationError("no API key: pass --api-key or set ALPHAVANTAGE_API_KEY");

  AlphaVantageOptions options;
  options.base_url = args.base_url.empty() ? config.fetch_base_url : args.base_url;
  options.min_request_interval =
      std::chrono::milliseconds(static_cast<long long>(config.fetch_min_delay_seconds * 1000));
  options.max_attempts = config.fetch_max_attempts;
  AlphaVantageClient client(key, options);
  const fs::path cache_dir = args.cache_dir.empty() ? config.fetch_cache_dir : args.cache_dir;
  const auto result = client.fetch_daily(symbol, cache_dir);
  if (result.stale) err << "warning: " << result.warning << "\n";
  if (!args.out.empty()) write_bars_csv(result.series, args.out);
  out << symbol << ": " << result.series.size() << " bars";
  if (result.series.size() > 0) {
    out << " (" << result.series[0].date.to_string() << " .. "
        << result.series[result.series.size() - 1].date.to_string() << ")";
  }
  out << (result.stale ? " from cache\n" : "\n");
  return kExitOk;
}

// ---- featurize ---------------------------------------------------------------

struct FeaturizeArgs {
  std::string bars;
  std::string news;
  std::string out;
  std::string report;
};

int cmd_featurize(const RunConfig& config, const FeaturizeArgs& args, std::ostream& out) {
  const fs::path bars_path = require_path(args.bars.empty() ? config.input_bars : args.bars, "--bars");
  const fs::path out_path = require_path(args.out, "--out");
  const fs::path report_path = args.report.empty() ? fs::path(out_path.string() + ".report.json") : fs::path(args.report);
  Provenance provenance(config, "featurize");

  const auto bars_text = read_file(bars_path);
  provenance.input("bars", bars_path, bars_text);
  BarSeries bars = [&] {
    try {
      return parse_bars_csv(bars_text, config.symbol);
    } catch (const DataError& e) {
      throw DataError(bars_path.string() + ": " + e.what());
    }
  }();

  const auto smoothed = smooth_series(bars, SmoothingParams{config.smoothing_alpha});
  const auto indicators = compute_all(smoothed, config.indicator_specs(), config.train_options().workers);
  const auto labels = make_labels(bars, LabelSpec{config.label_horizon});

  std::vector<DailySentiment> daily;
  json sentiment_info = {{"provider", config.sentiment_provider}};
  if (config.sentiment_provider != "none") {
    const fs::path news_path = require_path(args.news.empty() ? config.input_news : args.news, "--news");
    const auto news_text = read_file(news_path);
    provenance.input("news", news_path, news_text);
    auto items = parse_news_jsonl(news_text);
    if (!config.symbol.empty()) items = filter_for_symbol(items, config.symbol);
    const auto provider = make_provider(config);
    const auto scored = score_all(*provider, items, config.sentiment_parallelism);
    daily = aggregate_daily(scored, bars.dates(), AggregationOptions{config.sentiment_decay});
    std::size_t days_with_news = 0;
    std::size_t assigned = 0;
    for (const auto& d : daily) {
      days_with_news += d.article_count > 0;
      assigned += d.article_count;
    }
    sentiment_info["articles"] = items.size();
    sentiment_info["articles_assigned"] = assigned;
    sentiment_info["days_with_news"] = days_with_news;
    sentiment_info["decay"] = config.sentiment_decay;
  }

  const auto frame = assemble(bars.dates(), indicators, daily, labels);
  if (frame.rows() < 2) throw DataError("too few labeled rows after warm-up: " + std::to_string(frame.rows()));
  const auto n_train = train_rows_for(frame.rows(), config.train_fraction);
  auto [pruned, prune_report] = prune_correlated(frame, config.prune_threshold, 0, n_train);

  json ridge_info;
  try {
    const auto ridge = ridge_fit(pruned.slice_rows(0, n_train), config.ridge_lambda);
    json coefs = json::object();
    for (std::size_t i = 0; i < ridge.names.size(); ++i) coefs[ridge.names[i]] = ridge.coefficients[i];
    ridge_info = {{"lambda", ridge.lambda}, {"intercept", ridge.intercept}, {"coefficients", coefs}};
  } catch (const DataError& e) {
    ridge_info = {{"lambda", config.ridge_lambda}, {"error", e.what()}};
  }

  json pca_info = {{"enabled", config.pca_enabled}};
  FeatureFrame result = std::move(pruned);
  if (config.pca_enabled) {
    const auto pca = fit_pca(result.slice_rows(0, n_train), config.pca_variance_target);
    result = apply_pca(pca, result);
    pca_info["variance_target"] = config.pca_variance_target;
    pca_info["components"] = pca.components.size();
    pca_info["explained_variance_ratio"] = pca.explained_variance_ratio;
  }

  json warm_ups = json::object();
  for (const auto& c : indicators.columns) warm_ups[c.name] = c.warm_up;

  json report = {
      {"bars", bars.size()},
      {"price_adjustment", "none; prices used as provided by the input"},
      {"label_horizon", config.label_horizon},
      {"warm_up", indicators.warm_up},
      {"indicator_warm_up", warm_ups},
      {"rows", frame.rows()},
      {"train_rows", n_train},
      {"test_rows", frame.rows() - n_train},
      {"pre_prune_columns", frame.names()},
      {"columns", result.names()},
      {"prune", prune_json(prune_report)},
      {"ridge", ridge_info},
      {"pca", pca_info},
      {"sentiment", sentiment_info},
  };

  write_frame_csv(result, out_path);
  write_file(report_path, provenance.attach(report.dump(), 2));
  out << "featurize: " << frame.rows() << " rows, " << frame.cols() << " columns before pruning, "
      << result.cols() << " after; dropped " << prune_report.dropped.size() << "\n";
  return kExitOk;
}

// ---- tune / train / evaluate / compare ------------------------------------------

struct ModelArgs {
  std::string features;
  std::string params;
  std::string model;
  std::string out;
  std::string out_dir;
  std::string model_id = "sarf";
};

int cmd_tune(const RunConfig& config, const ModelArgs& args, std::ostream& out) {
  const fs::path features = require_path(args.features.empty() ? config.input_features : args.features, "--features");
  const fs::path out_path = require_path(args.out, "--out");
  Provenance provenance(config, "tune");
  const auto frame = load_frame(features, provenance, "features");
  const auto [train, test] = chronological_split(frame, config.train_fraction);
  const auto result = random_search(train, config.search_options(), config.train_options());
  write_file(out_path, provenance.attach(search_result_json(result), 2));
  const auto& best = result.trials[result.best_index];
  out << "tune: " << result.trials.size() << " trials, best #" << result.best_index << " mean AUC "
      << format_number(best.mean_auc) << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& config, const ModelArgs& args, std::ostream& out) {
  const fs::path features = require_path(args.features.empty() ? config.input_features : args.features, "--features");
  const fs::path out_path = require_path(args.out, "--out");
  Provenance provenance(config, "train");
  const auto frame = load_frame(features, provenance, "features");
  HyperParams params = config.forest;
  params.seed = config.seed;
  const std::string params_path = args.params.empty() ? config.input_params : args.params;
  if (!params_path.empty()) {
    const auto text = read_file(params_path);
    provenance.input("params", params_path, text);
    params = search_result_from_json(text).best();
  }
  const auto [train, test] = chronological_split(frame, config.train_fraction);
  const auto model = train_forest(train, params, config.train_options());
  write_file(out_path, provenance.attach(model_to_json(model), -1));
  out << "train: " << model.trees.size() << " trees on " << train.rows() << " rows, " << train.cols()
      << " features\n";
  return kExitOk;
}

void write_curves(const fs::path& dir, const std::string& prefix, const EvalReport& report) {
  write_file(dir / (prefix + "roc.csv"), curve_csv(report.roc_points));
  write_file(dir / (prefix + "pr.csv"), curve_csv(report.pr_points));
}

int cmd_evaluate(const RunConfig& config, const ModelArgs& args, std::ostream& out) {
  const fs::path features = require_path(args.features.empty() ? config.input_features : args.features, "--features");
  const fs::path model_path = require_path(args.model.empty() ? config.input_model : args.model, "--model");
  const fs::path dir = require_path(args.out_dir.empty() ? config.output_dir : args.out_dir, "--out-dir");
  Provenance provenance(config, "evaluate");
  const auto frame = load_frame(features, provenance, "features");
  const auto model_text = read_file(model_path);
  provenance.input("model", model_path, model_text);
  const auto model = model_from_json(model_text);
  const auto [train, test] = chronological_split(frame, config.train_fraction);
  const auto report = evaluate_model(model, test, args.model_id, dataset_id_for(config, features));
  write_file(dir / "report.json", provenance.attach(eval_report_json(report), 2));
  write_curves(dir, "", report);
  const auto text = eval_report_text(report);
  write_file(dir / "summary.txt", text);
  out << text;
  return kExitOk;
}

int cmd_compare(const RunConfig& config, const ModelArgs& args, std::ostream& out) {
  const fs::path features = require_path(args.features.empty() ? config.input_features : args.features, "--features");
  const fs::path dir = require_path(args.out_dir.empty() ? config.output_dir : args.out_dir, "--out-dir");
  Provenance provenance(config, "compare");
  const auto frame = load_frame(features, provenance, "features");
  std::vector<std::string> sentiment;
  for (const auto name : kSentimentColumns) {
    if (frame.column_index(name)) sentiment.emplace_back(name);
  }
  if (sentiment.empty()) {
    throw DataError("compare needs at least one of sent_positive, sent_negative, sent_neutral, sent_composite");
  }
  if (sentiment.size() == frame.cols()) throw DataError("compare needs technical columns besides sentiment");
  const auto technical = frame.drop_columns(sentiment);

  CompareOptions options;
  options.search = config.search_options();
  options.train = config.train_options();
  options.train_fraction = config.train_fraction;
  options.dataset_id = dataset_id_for(config, features);
  const auto report = compare_models(frame, technical, options);

  write_file(dir / "comparison.json", provenance.attach(comparison_json(report), 2));
  const auto table = comparison_table(std::span<const ComparisonReport>(&report, 1));
  write_file(dir / "comparison.txt", table);
  write_curves(dir, "baseline_", report.baseline.report);
  write_curves(dir, "sarf_", report.sarf.report);
  out << table;
  return kExitOk;
}

// ---- synth -------------------------------------------------------------------

struct SynthArgs {
  std::size_t days = 2000;
  double signal_probability = 0.8;
  std::string out;
};

int cmd_synth(const RunConfig& config, const SynthArgs& args, std::ostream& out) {
  const fs::path out_path = require_path(args.out, "--out");
  const auto frame = sentiment_signal_frame(args.days, args.signal_probability, config.seed);
  write_frame_csv(frame, out_path);
  out << "synth: " << frame.rows() << " rows, " << frame.cols() << " columns\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentiment-augmented random forest pipeline", "sarf"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  std::uint64_t seed = 0;
  int trials = 0;
  std::size_t horizon = 0;
  unsigned threads = 0;
  auto* config_opt = app.add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Global seed");
  auto* trials_opt = app.add_option("--trials", trials, "Search trials")->check(CLI::Range(1, 100000));
  auto* horizon_opt = app.add_option("--horizon", horizon, "Label horizon in trading days")->check(CLI::Range(1, 100000));
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0 = hardware)");

  FetchArgs fetch_args;
  auto* fetch = app.add_subcommand("fetch", "Download daily bars into the cache");
  fetch->add_option("--symbol", fetch_args.symbol, "Ticker symbol");
  fetch->add_option("--out", fetch_args.out, "Also write the bars CSV here");
  fetch->add_option("--api-key", fetch_args.api_key, "API key (default: $ALPHAVANTAGE_API_KEY)");
  fetch->add_option("--cache-dir", fetch_args.cache_dir, "Cache directory");
  fetch->add_option("--base-url", fetch_args.base_url, "API base URL");

  FeaturizeArgs featurize_args;
  auto* featurize = app.add_subcommand("featurize", "Build the feature frame from bars and news");
  featurize->add_option("--bars", featurize_args.bars, "Bars CSV");
  featurize->add_option("--news", featurize_args.news, "News JSON lines");
  featurize->add_option("--out", featurize_args.out, "Feature frame CSV")->required();
  featurize->add_option("--report", featurize_args.report, "Feature report JSON (default: <out>.report.json)");

  ModelArgs model_args;
  auto* tune = app.add_subcommand("tune", "Random hyperparameter search on the training rows");
  tune->add_option("--features", model_args.features, "Feature frame CSV");
  tune->add_option("--out", model_args.out, "Search result JSON")->required();

  auto* train = app.add_subcommand("train", "Train a forest on the training rows");
  train->add_option("--features", model_args.features, "Feature frame CSV");
  train->add_option("--params", model_args.params, "Search result JSON whose best trial is used");
  train->add_option("--out", model_args.out, "Model JSON")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on the test rows");
  evaluate->add_option("--features", model_args.features, "Feature frame CSV");
  evaluate->add_option("--model", model_args.model, "Model JSON");
  evaluate->add_option("--out-dir", model_args.out_dir, "Output directory");
  evaluate->add_option("--model-id", model_args.model_id, "Model identifier in reports");

  auto* compare = app.add_subcommand("compare", "Compare against the technical-only baseline");
  compare->add_option("--features", model_args.features, "Feature frame CSV");
  compare->add_option("--out-dir", model_args.out_dir, "Output directory");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic sentiment-signal frame");
  synth->add_option("--days", synth_args.days, "Rows")->check(CLI::Range(10, 10000000));
  synth->add_option("--signal", synth_args.signal_probability, "Probability the label follows sentiment")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--out", synth_args.out, "Frame CSV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_opt->count() > 0 ? load_run_config(config_path) : RunConfig{};
    if (seed_opt->count() > 0) config.seed = seed;
    if (trials_opt->count() > 0) config.search_trials = trials;
    if (horizon_opt->count() > 0) config.label_horizon = horizon;
    if (threads_opt->count() > 0) config.threads = threads;
    config.validate();

    if (fetch->parsed()) return cmd_fetch(config, fetch_args, out, err);
    if (featurize->parsed()) return cmd_featurize(config, featurize_args, out);
    if (tune->parsed()) return cmd_tune(config, model_args, out);
    if (train->parsed()) return cmd_train(config, model_args, out);
    if (evaluate->parsed()) return cmd_evaluate(config, model_args, out);
    if (compare->parsed()) return cmd_compare(config, model_args, out);
    if (synth->parsed()) return cmd_synth(config, synth_args, out);
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NetworkError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace sarf::app

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "generators.hpp"
#include "oracles.hpp"
#include "sarf/errors.hpp"
#include "sarf/features.hpp"
#include "sarf/indicators.hpp"
#include "sarf/preprocess.hpp"
#include "sarf/random.hpp"
#include "sarf/sentiment.hpp"
#include "sarf/synthetic.hpp"
#include "test_support.hpp"

namespace sarf {
namespace {

using sarf::testing::fixture_path;

using sarf::testing::frame_from_columns;
using sarf::testing::planted_correlation_columns;

std::vector<Date> days(std::size_t n) { return sarf::testing::consecutive_days(n); }

TEST(FeatureFrame, ValidatesShapeNamesAndValues) {
  EXPECT_THROW(FeatureFrame(days(2), {"a", "a"}, {1, 2, 3, 4}), DataError);
  EXPECT_THROW(FeatureFrame(days(2), {"a"}, {1, 2, 3}), DataError);
  EXPECT_THROW(FeatureFrame(days(2), {"a"}, {1, 2}, std::vector<int>{1}), DataError);
  EXPECT_THROW(FeatureFrame(days(2), {"a"}, {1, 2}, std::vector<int>{1, 2}), DataError);
  try {
    FeatureFrame(days(2), {"a", "bad"}, {1, 2, 3, std::numeric_limits<double>::quiet_NaN()});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos) << e.what();
  }
}

TEST(FeatureFrame, ColumnOperations) {
  const auto f = frame_from_columns({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}, {0, 1, 0});
  EXPECT_EQ(f.column(1), (std::vector<double>{4, 5, 6}));
  EXPECT_EQ(f.column_index("c2"), 2u);
  EXPECT_FALSE(f.column_index("zz").has_value());
  const std::vector<std::string> pick{"c2", "c0"};
  const auto s = f.select_columns(pick);
  EXPECT_EQ(s.names(), pick);
  EXPECT_EQ(s.at(1, 0), 8);
  const std::vector<std::string> drop{"c1"};
  EXPECT_EQ(f.drop_columns(drop).names(), (std::vector<std::string>{"c0", "c2"}));
  const auto sl = f.slice_rows(1, 3);
  EXPECT_EQ(sl.rows(), 2u);
  EXPECT_EQ(sl.labels(), (std::vector<int>{1, 0}));
  const std::vector<std::size_t> idx{2, 2, 0};
  EXPECT_EQ(f.take_rows(idx).column(0), (std::vector<double>{3, 3, 1}));
}

TEST(FeatureFrame, CsvRoundTrip) {
  const auto f = sentiment_signal_frame(50, 0.8, 3);
  const auto text = serialize_frame_csv(f);
  EXPECT_EQ(text.substr(0, 8), "date,ma,");
  const auto back = parse_frame_csv(text);
  EXPECT_EQ(back, f);
  EXPECT_EQ(serialize_frame_csv(back), text);
  const auto unlabeled = FeatureFrame(days(2), {"x"}, {0.5, 1.5});
  EXPECT_EQ(parse_frame_csv(serialize_frame_csv(unlabeled)), unlabeled);
  EXPECT_THROW(parse_frame_csv("date,x,label\n2020-01-01,1,2\n"), DataError);
  EXPECT_THROW(parse_frame_csv("date,x\n2020-01-01,abc\n"), DataError);
}

FeatureFrame fixture_frame(bool with_sentiment, std::size_t* warm_up = nullptr) {
  const auto bars = read_bars_csv(fixture_path("ACME_daily.csv"), "ACME");
  const auto indicators = compute_all(smooth_series(bars, {0.2}), default_indicator_specs());
  if (warm_up) *warm_up = indicators.warm_up;
  const auto labels = make_labels(bars, {60});
  std::vector<DailySentiment> daily;
  if (with_sentiment) {
    const auto provider = FixtureProvider::load(fixture_path("ACME_scores.jsonl"));
    const auto items = filter_for_symbol(read_news_jsonl(fixture_path("ACME_news.jsonl")), "ACME");
    daily = aggregate_daily(score_all(provider, items), bars.dates());
  }
  return assemble(bars.dates(), indicators, daily, labels);
}

TEST(Assemble, BundledFixtureShape) {
  std::size_t warm_up = 0;
  const auto frame = fixture_frame(true, &warm_up);
  EXPECT_EQ(warm_up, 78u);
  EXPECT_EQ(frame.cols(), 19u);
  EXPECT_EQ(frame.rows(), 2200u - 78u - 60u);
  EXPECT_EQ(frame.names()[0], "ma");
  EXPECT_EQ(frame.names()[14], "adx");
  EXPECT_EQ(frame.names()[15], "sent_positive");
  EXPECT_EQ(frame.names()[18], "sent_composite");
  const auto bars = read_bars_csv(fixture_path("ACME_daily.csv"), "ACME");
  EXPECT_EQ(frame.dates().front(), bars[78].date);
  EXPECT_EQ(frame.dates().back(), bars[2200 - 61].date);
  EXPECT_EQ(frame.labels()[0], bars[78 + 60].close > bars[78].close ? 1 : 0);
}

TEST(Assemble, TechnicalOnlyHas15Columns) {
  const auto frame = fixture_frame(false);
  EXPECT_EQ(frame.cols(), 15u);
  EXPECT_EQ(frame.rows(), 2062u);
}

TEST(Assemble, RejectsMismatchedCalendar) {
  const auto bars = random_walk_bars(200, 3);
  const auto indicators = compute_all(bars, default_indicator_specs());
  const auto labels = make_labels(bars, {10});
  std::vector<DailySentiment> short_daily(5);
  EXPECT_THROW(assemble(bars.dates(), indicators, short_daily, labels), DataError);
}

TEST(Pearson, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1}, c{5, 5, 5, 5};
  EXPECT_NEAR(*pearson(x, y), 1.0, 1e-15);
  EXPECT_NEAR(*pearson(x, z), -1.0, 1e-15);
  EXPECT_FALSE(pearson(x, c).has_value());
}

TEST(Prune, DuplicatedColumnDropsExactlyOne) {
  Rng rng(1);
  std::vector<double> a(100), b(100);
  for (std::size_t i = 0; i < 100; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  const auto f = frame_from_columns({a, b, a});
  const auto [pruned, report] = prune_correlated(f, 0.8, 0, 100);
  ASSERT_EQ(report.dropped.size(), 1u);
  EXPECT_EQ(report.dropped[0].reason, "correlated");
  EXPECT_NEAR(std::abs(report.dropped[0].correlation), 1.0, 1e-12);
  EXPECT_EQ(pruned.cols(), 2u);
}

TEST(Prune, OrthogonalColumnsUntouched) {
  Rng rng(2);
  std::vector<std::vector<double>> cols(4, std::vector<double>(500));
  for (auto& c : cols) {
    for (auto& v : c) v = rng.normal();
  }
  const auto [pruned, report] = prune_correlated(frame_from_columns(cols), 0.8, 0, 500);
  EXPECT_TRUE(report.dropped.empty());
  EXPECT_EQ(pruned.cols(), 4u);
}

TEST(Prune, ConstantColumnDroppedFirst) {
  const auto f = frame_from_columns({{1, 2, 3, 4}, {7, 7, 7, 7}, {4, 1, 3, 2}});
  const auto [pruned, report] = prune_correlated(f, 0.8, 0, 4);
  ASSERT_EQ(report.dropped.size(), 1u);
  EXPECT_EQ(report.dropped[0].name, "c1");
  EXPECT_EQ(report.dropped[0].reason, "constant");
  EXPECT_EQ(report.kept, (std::vector<std::string>{"c0", "c2"}));
}

TEST(Prune, MatchesBruteForceOracleOnPlantedStructure) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto cols = planted_correlation_columns(seed);
    const auto oracle = sarf::testing::brute_force_prune(cols, 0.8);
    ASSERT_EQ(oracle.size(), 1u) << "rule should admit exactly one elimination order";
    const auto [pruned, report] = prune_correlated(frame_from_columns(cols), 0.8, 0, cols[0].size());
    std::vector<std::string> expected;
    for (auto c : oracle[0]) expected.push_back("c" + std::to_string(c));
    EXPECT_EQ(report.kept, expected) << "seed " << seed;
  }
}

TEST(Prune, ReportInvariantsAndThreshold) {
  const auto frame = fixture_frame(true);
  const auto n_train = train_rows_for(frame.rows(), 0.6667);
  const auto [pruned, report] = prune_correlated(frame, 0.8, 0, n_train);
  EXPECT_EQ(report.kept.size() + report.dropped.size(), 19u);
  for (const auto& d : report.dropped) {
    if (d.reason == "correlated") EXPECT_GT(std::abs(d.correlation), 0.8) << d.name;
  }
  const auto train = pruned.slice_rows(0, n_train);
  for (std::size_t i = 0; i < train.cols(); ++i) {
    for (std::size_t j = i + 1; j < train.cols(); ++j) {
      EXPECT_LE(std::abs(*pearson(train.column(i), train.column(j))), 0.8);
    }
  }
}

TEST(Prune, IgnoresTestRows) {
  const auto cols = planted_correlation_columns(5, 400);
  const auto base = frame_from_columns(cols);
  auto corrupted_cols = cols;
  Rng rng(9);
  for (auto& c : corrupted_cols) {
    for (std::size_t r = 300; r < 400; ++r) c[r] = 1000 * rng.normal();
  }
  const auto a = prune_correlated(base, 0.8, 0, 300).second;
  const auto b = prune_correlated(frame_from_columns(corrupted_cols), 0.8, 0, 300).second;
  EXPECT_EQ(a.kept, b.kept);
  ASSERT_EQ(a.dropped.size(), b.dropped.size());
  for (std::size_t i = 0; i < a.dropped.size(); ++i) EXPECT_EQ(a.dropped[i].correlation, b.dropped[i].correlation);
}

TEST(Split, CeilingArithmetic) {
  EXPECT_EQ(train_rows_for(9, 2.0 / 3.0), 6u);
  EXPECT_EQ(train_rows_for(2062, 0.6667), 1375u);
  EXPECT_EQ(train_rows_for(2062, 2.0 / 3.0), 1375u);
  EXPECT_EQ(train_rows_for(10, 0.5), 5u);
  EXPECT_THROW(train_rows_for(10, 1.0), std::invalid_argument);
  EXPECT_THROW(train_rows_for(10, 0.0), std::invalid_argument);
}

TEST(Split, ChronologicalOrder) {
  const auto f = sentiment_signal_frame(9, 0.8, 1);
  const auto [train, test] = chronological_split(f, 2.0 / 3.0);
  EXPECT_EQ(train.rows(), 6u);
  EXPECT_EQ(test.rows(), 3u);
  EXPECT_LT(train.dates().back(), test.dates().front());
  const auto one = f.slice_rows(0, 1);
  EXPECT_THROW(chronological_split(one, 0.5), DataError);
}

}  // namespace
}  // namespace sarf

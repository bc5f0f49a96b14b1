#include "sarf/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sarf/errors.hpp"
#include "sarf/market_data.hpp"

namespace sarf {

FeatureFrame::FeatureFrame(std::vector<Date> dates, std::vector<std::string> names, std::vector<double> values,
                           std::optional<std::vector<int>> labels)
    : dates_(std::move(dates)), names_(std::move(names)), values_(std::move(values)), labels_(std::move(labels)) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw DataError("duplicate feature column '" + n + "'");
  }
  if (values_.size() != dates_.size() * names_.size()) throw DataError("feature matrix shape mismatch");
  if (labels_ && labels_->size() != dates_.size()) throw DataError("label count does not match row count");
  if (labels_) {
    for (int y : *labels_) {
      if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    }
  }
  for (std::size_t r = 0; r < dates_.size(); ++r) {
    for (std::size_t c = 0; c < names_.size(); ++c) {
      if (!std::isfinite(values_[r * names_.size() + c])) {
        throw DataError("column '" + names_[c] + "' has a non-finite value at " + dates_[r].to_string());
      }
    }
  }
}

const std::vector<int>& FeatureFrame::labels() const {
  if (!labels_) throw DataError("feature frame has no labels");
  return *labels_;
}

std::vector<double> FeatureFrame::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::optional<std::size_t> FeatureFrame::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (names_[c] == name) return c;
  }
  return std::nullopt;
}

FeatureFrame FeatureFrame::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows()) throw std::out_of_range("slice_rows: bad range");
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  return take_rows(idx);
}

FeatureFrame FeatureFrame::take_rows(std::span<const std::size_t> indices) const {
  FeatureFrame out;
  out.names_ = names_;
  out.dates_.reserve(indices.size());
  out.values_.reserve(indices.size() * cols());
  if (labels_) out.labels_.emplace().reserve(indices.size());
  for (auto r : indices) {
    if (r >= rows()) throw std::out_of_range("take_rows: index out of range");
    out.dates_.push_back(dates_[r]);
    const auto row_values = row(r);
    out.values_.insert(out.values_.end(), row_values.begin(), row_values.end());
    if (labels_) out.labels_->push_back((*labels_)[r]);
  }
  return out;
}

FeatureFrame FeatureFrame::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto c = column_index(n);
    if (!c) throw DataError("feature frame has no column '" + n + "'");
    idx.push_back(*c);
  }
  std::vector<double> values;
  values.reserve(rows() * idx.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (auto c : idx) values.push_back(at(r, c));
  }
  return FeatureFrame(dates_, std::vector<std::string>(names.begin(), names.end()), std::move(values), labels_);
}

FeatureFrame FeatureFrame::drop_columns(std::span<const std::string> names) const {
  std::vector<std::string> keep;
  for (const auto& n : names_) {
    if (std::find(names.begin(), names.end(), n) == names.end()) keep.push_back(n);
  }
  return select_columns(keep);
}

std::string serialize_frame_csv(const FeatureFrame& frame) {
  std::string out = "date";
  for (const auto& n : frame.names()) out += "," + n;
  if (frame.has_labels()) out += ",label";
  out.push_back('\n');
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    out += frame.dates()[r].to_string();
    for (double v : frame.row(r)) {
      out.push_back(',');
      out += format_number(v);
    }
    if (frame.has_labels()) out += frame.labels()[r] ? ",1" : ",0";
    out.push_back('\n');
  }
  return out;
}

FeatureFrame parse_frame_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line)) throw DataError("feature CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line);
  if (header.empty() || header[0] != "date") throw DataError("feature CSV header must start with 'date'");
  const bool labeled = header.size() >= 2 && header.back() == "label";
  std::vector<std::string> names(header.begin() + 1, header.end() - (labeled ? 1 : 0));
  std::vector<Date> dates;
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    const std::string where = "feature CSV line " + std::to_string(line_no);
    if (fields.size() != header.size()) throw DataError(where + ": expected " + std::to_string(header.size()) + " columns");
    try {
      dates.push_back(Date::parse(fields[0]));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto& f = fields[c + 1];
      double v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw DataError(where + ": cannot parse column '" + names[c] + "' value '" + f + "'");
      }
      values.push_back(v);
    }
    if (labeled) {
      const auto& f = fields.back();
      if (f != "0" && f != "1") throw DataError(where + ": label must be 0 or 1");
      labels.push_back(f == "1" ? 1 : 0);
    }
  }
  return FeatureFrame(std::move(dates), std::move(names), std::move(values),
                      labeled ? std::optional<std::vector<int>>(std::move(labels)) : std::nullopt);
}

FeatureFrame read_frame_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_frame_csv(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_frame_csv(const FeatureFrame& frame, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_frame_csv(frame);
}

FeatureFrame assemble(std::span<const Date> calendar, const IndicatorSet& indicators,
                      std::span<const DailySentiment> sentiment, const Labels& labels) {
  const std::size_t n = calendar.size();
  if (!sentiment.empty()) {
    if (sentiment.size() != n) throw DataError("sentiment calendar length differs from bar calendar");
    for (std::size_t i = 0; i < n; ++i) {
      if (sentiment[i].date != calendar[i]) {
        throw DataError("sentiment calendar mismatch at " + calendar[i].to_string());
      }
    }
  }
  if (labels.dates.size() > n) throw DataError("more labels than calendar days");
  for (std::size_t i = 0; i < labels.dates.size(); ++i) {
    if (labels.dates[i] != calendar[i]) throw DataError("label calendar mismatch at " + calendar[i].to_string());
  }
  std::size_t first = 0;
  std::vector<std::string> names;
  for (const auto& col : indicators.columns) {
    if (col.warm_up + col.values.size() != n) {
      throw DataError("indicator column '" + col.name + "' does not span the calendar");
    }
    first = std::max(first, col.warm_up);
    names.push_back(col.name);
  }
  if (!sentiment.empty()) {
    for (auto name : kSentimentColumns) names.emplace_back(name);
  }
  const std::size_t end = labels.values.size();
  if (first >= end) throw DataError("no dates have every feature defined and a label");

  std::vector<Date> dates;
  std::vector<double> values;
  std::vector<int> y;
  values.reserve((end - first) * names.size());
  for (std::size_t t = first; t < end; ++t) {
    dates.push_back(calendar[t]);
    for (const auto& col : indicators.columns) values.push_back(col.at(t));
    if (!sentiment.empty()) {
      const auto& s = sentiment[t];
      values.insert(values.end(), {s.mean_positive, s.mean_negative, s.mean_neutral, s.mean_composite});
    }
    y.push_back(labels.values[t]);
  }
  return FeatureFrame(std::move(dates), std::move(names), std::move(values), std::move(y));
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::pair<FeatureFrame, PruneReport> prune_correlated(const FeatureFrame& frame, double threshold,
                                                      std::size_t train_begin, std::size_t train_end) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("prune threshold must be in (0, 1)");
  if (train_begin >= train_end || train_end > frame.rows()) throw std::invalid_argument("prune: bad training range");
  const std::size_t p = frame.cols();
  std::vector<std::vector<double>> cols(p);
  for (std::size_t c = 0; c < p; ++c) {
    cols[c].reserve(train_end - train_begin);
    for (std::size_t r = train_begin; r < train_end; ++r) cols[c].push_back(frame.at(r, c));
  }
  PruneReport report;
  report.threshold = threshold;
  std::vector<bool> kept(p, true);
  std::vector<std::vector<double>> rho(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    const bool constant =
        std::all_of(cols[i].begin(), cols[i].end(), [&](double v) { return v == cols[i].front(); });
    if (constant) {
      kept[i] = false;
      report.dropped.push_back({frame.names()[i], "", 0.0, "constant"});
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (!kept[i] || !kept[j]) continue;
      rho[i][j] = rho[j][i] = pearson(cols[i], cols[j]).value_or(0.0);
    }
  }
  while (true) {
    std::size_t bi = p, bj = p;
    double best = threshold;
    for (std::size_t i = 0; i < p; ++i) {
      if (!kept[i]) continue;
      for (std::size_t j = i + 1; j < p; ++j) {
        if (!kept[j]) continue;
        if (std::abs(rho[i][j]) > best) {
          best = std::abs(rho[i][j]);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == p) break;
    auto mean_abs = [&](std::size_t c) {
      double s = 0;
      std::size_t m = 0;
      for (std::size_t k = 0; k < p; ++k) {
        if (k == c || !kept[k]) continue;
        s += std::abs(rho[c][k]);
        ++m;
      }
      return m ? s / static_cast<double>(m) : 0.0;
    };
    const double mi = mean_abs(bi), mj = mean_abs(bj);
    const std::size_t drop = mi > mj ? bi : bj;
    const std::size_t partner = drop == bi ? bj : bi;
    kept[drop] = false;
    report.dropped.push_back({frame.names()[drop], frame.names()[partner], rho[bi][bj], "correlated"});
  }
  for (std::size_t c = 0; c < p; ++c) {
    if (kept[c]) report.kept.push_back(frame.names()[c]);
  }
  return {frame.select_columns(report.kept), std::move(report)};
}

std::size_t train_rows_for(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must be in (0, 1)");
  }
  // The epsilon keeps exact products such as 9 * (2/3) from rounding up.
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_fraction - 1e-9));
}

std::pair<FeatureFrame, FeatureFrame> chronological_split(const FeatureFrame& frame, double train_fraction) {
  const std::size_t n_train = train_rows_for(frame.rows(), train_fraction);
  if (n_train == 0 || n_train >= frame.rows()) {
    throw DataError("chronological split of " + std::to_string(frame.rows()) + " rows leaves an empty side");
  }
  return {frame.slice_rows(0, n_train), frame.slice_rows(n_train, frame.rows())};
}

}  // namespace sarf

#include "sarf/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sarf/errors.hpp"

namespace sarf {
namespace {

constexpr std::string_view kHeader = "date,open,high,low,close,volume";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::optional<std::string> check_bar(const Bar& b) {
  if (!(b.open > 0 && b.high > 0 && b.low > 0 && b.close > 0)) return "prices > 0";
  if (!(b.volume >= 0)) return "volume >= 0";
  if (!(b.high >= std::max(b.open, b.close))) return "high >= max(open,close)";
  if (!(b.low <= std::min(b.open, b.close))) return "low <= min(open,close)";
  if (!(b.low <= b.high)) return "low <= high";
  return std::nullopt;
}

BarSeries::BarSeries(std::string symbol, std::vector<Bar> bars)
    : symbol_(std::move(symbol)), bars_(std::move(bars)) {
  if (bars_.empty()) throw DataError("bar series must contain at least one bar");
  for (std::size_t i = 0; i < bars_.size(); ++i) {
    if (auto rule = check_bar(bars_[i])) {
      throw DataError("bar " + bars_[i].date.to_string() + " violates " + *rule);
    }
    if (i > 0 && !(bars_[i - 1].date < bars_[i].date)) {
      throw DataError("bar dates not strictly increasing at " + bars_[i].date.to_string());
    }
  }
}

std::vector<Date> BarSeries::dates() const {
  std::vector<Date> out;
  out.reserve(bars_.size());
  for (const auto& b : bars_) out.push_back(b.date);
  return out;
}

std::vector<double> BarSeries::closes() const {
  std::vector<double> out;
  out.reserve(bars_.size());
  for (const auto& b : bars_) out.push_back(b.close);
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf, ptr);
}

BarSeries parse_bars_csv(std::string_view text, std::string symbol) {
  struct Row {
    Bar bar;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kHeader) {
        throw DataError("line " + std::to_string(line_no) + ": expected header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 6) {
      throw DataError(where + ": expected 6 columns, found " + std::to_string(fields.size()));
    }
    Bar bar;
    try {
      bar.date = Date::parse(fields[0]);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    double* targets[5] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.volume};
    static constexpr const char* kNames[5] = {"open", "high", "low", "close", "volume"};
    for (int k = 0; k < 5; ++k) {
      const auto v = parse_double(fields[k + 1]);
      if (!v) throw DataError(where + ": cannot parse " + kNames[k] + " '" + std::string(fields[k + 1]) + "'");
      *targets[k] = *v;
    }
    if (auto rule = check_bar(bar)) throw DataError(where + ": violates " + *rule);
    rows.push_back({bar, line_no});
  }
  if (!header_seen) throw DataError("empty CSV document");
  if (rows.empty()) throw DataError("CSV contains no bars");
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.bar.date < b.bar.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].bar.date == rows[i - 1].bar.date) {
      throw DataError("line " + std::to_string(std::max(rows[i].line, rows[i - 1].line)) + ": duplicate date " +
                      rows[i].bar.date.to_string() + " (also on line " +
                      std::to_string(std::min(rows[i].line, rows[i - 1].line)) + ")");
    }
  }
  std::vector<Bar> bars;
  bars.reserve(rows.size());
  for (auto& r : rows) bars.push_back(r.bar);
  return BarSeries(std::move(symbol), std::move(bars));
}

std::string serialize_bars_csv(const BarSeries& series) {
  std::string out(kHeader);
  out.push_back('\n');
  for (const auto& b : series.bars()) {
    out += b.date.to_string();
    for (double v : {b.open, b.high, b.low, b.close, b.volume}) {
      out.push_back(',');
      out += format_number(v);
    }
    out.push_back('\n');
  }
  return out;
}

BarSeries read_bars_csv(const std::filesystem::path& path, std::string symbol) {
  if (symbol.empty()) symbol = path.stem().string();
  try {
    return parse_bars_csv(read_file(path), std::move(symbol));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_bars_csv(const BarSeries& series, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp);
    out << serialize_bars_csv(series);
    if (!out) throw DataError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path cache_path(const std::filesystem::path& cache_dir, std::string_view symbol) {
  return cache_dir / (std::string(symbol) + ".csv");
}

}  // namespace sarf

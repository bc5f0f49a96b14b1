#include "sarf/date.hpp"

#include <charconv>
#include <cstdio>

#include "sarf/errors.hpp"

namespace sarf {
namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') return false;
  }
  return std::from_chars(first, last, out).ec == std::errc{};
}

std::chrono::year_month_day parse_ymd(std::string_view text, std::string_view whole) {
  int y = 0, m = 0, d = 0;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-' || !read_int(text, 0, 4, y) ||
      !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
    throw DataError("invalid date '" + std::string(whole) + "' (expected YYYY-MM-DD)");
  }
  std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(static_cast<unsigned>(m)),
                                  std::chrono::day(static_cast<unsigned>(d))};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(whole) + "'");
  return ymd;
}

}  // namespace

Date Date::parse(std::string_view text) {
  if (text.size() != 10) throw DataError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  return Date(std::chrono::sys_days(parse_ymd(text, text)));
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year(year), std::chrono::month(month), std::chrono::day(day)};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  return Date(std::chrono::sys_days(ymd));
}

std::string Date::to_string() const {
  std::chrono::year_month_day ymd(days_);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

bool Date::is_weekend() const {
  std::chrono::weekday wd(days_);
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

Instant parse_instant(std::string_view text) {
  auto fail = [&]() -> Instant {
    throw DataError("invalid timestamp '" + std::string(text) + "'");
  };
  if (text.size() < 10) return fail();
  Instant t{std::chrono::sys_days(parse_ymd(text.substr(0, 10), text))};
  if (text.size() == 10) return t;
  if (text[10] != 'T' && text[10] != ' ') return fail();
  int hh = 0, mm = 0, ss = 0;
  if (!read_int(text, 11, 2, hh) || text.size() < 16 || text[13] != ':' || !read_int(text, 14, 2, mm)) {
    return fail();
  }
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (!read_int(text, pos + 1, 2, ss)) return fail();
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return fail();
  t += std::chrono::hours(hh) + std::chrono::minutes(mm) + std::chrono::seconds(ss);
  if (pos == text.size()) return t;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return t;
  if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
    int oh = 0, om = 0;
    if (!read_int(text, pos + 1, 2, oh) || !read_int(text, pos + 4, 2, om)) return fail();
    auto offset = std::chrono::hours(oh) + std::chrono::minutes(om);
    // Local time = UTC + offset.
    return text[pos] == '+' ? t - offset : t + offset;
  }
  return fail();
}

}  // namespace sarf

#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace sarf {

// A calendar day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days d) : days_(d) {}

  // Parses "YYYY-MM-DD". Throws DataError on anything else.
  static Date parse(std::string_view text);
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::string to_string() const;
  constexpr std::chrono::sys_days sys_days() const { return days_; }
  constexpr Date plus_days(int n) const { return Date(days_ + std::chrono::days(n)); }
  bool is_weekend() const;

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

// A UTC instant with second resolution.
using Instant = std::chrono::sys_seconds;

// Parses ISO 8601 "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS][.fff](Z|+HH:MM|-HH:MM)?".
// A missing offset is read as UTC; a bare date is midnight UTC.
Instant parse_instant(std::string_view text);

}  // namespace sarf

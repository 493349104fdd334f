#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace tnbma {

using Date = std::chrono::year_month_day;

// Parses strict ISO-8601 calendar dates (YYYY-MM-DD); throws ParseError.
Date parse_date(std::string_view text);

std::string format_date(const Date& date);

inline std::chrono::sys_days to_days(const Date& d) {
  return std::chrono::sys_days(d);
}

inline Date add_days(const Date& d, int n) {
  return Date(to_days(d) + std::chrono::days(n));
}

inline int days_between(const Date& from, const Date& to) {
  return static_cast<int>((to_days(to) - to_days(from)).count());
}

}  // namespace tnbma

#include "eqodds/date.h"

#include <charconv>
#include <cstdio>

#include "eqodds/errors.h"

namespace eqodds {

namespace {

int ParseField(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("malformed date '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Date ParseDate(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ValidationError("malformed date '" + std::string(text) +
                          "', expected YYYY-MM-DD");
  }
  const int y = ParseField(text.substr(0, 4), text);
  const int m = ParseField(text.substr(5, 2), text);
  const int d = ParseField(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw ValidationError("invalid calendar date '" + std::string(text) + "'");
  }
  return ymd;
}

std::string FormatDate(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

Date AddYears(Date date, int years) {
  std::chrono::year_month_day ymd{date};
  ymd += std::chrono::years{years};
  if (!ymd.ok()) {
    ymd = ymd.year() / ymd.month() / std::chrono::last;
  }
  return ymd;
}

int AgeInYears(Date birth, Date on) {
  const std::chrono::year_month_day b{birth};
  const std::chrono::year_month_day o{on};
  int age = static_cast<int>(o.year()) - static_cast<int>(b.year());
  if (std::chrono::month_day{o.month(), o.day()} <
      std::chrono::month_day{b.month(), b.day()}) {
    --age;
  }
  return age;
}

}  // namespace eqodds

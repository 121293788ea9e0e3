#ifndef EQODDS_DATE_H_
#define EQODDS_DATE_H_

#include <chrono>
#include <string>
#include <string_view>

namespace eqodds {

// Calendar date at day resolution.
using Date = std::chrono::sys_days;

// Parses "YYYY-MM-DD". Throws ValidationError on malformed or impossible
// dates.
Date ParseDate(std::string_view text);
std::string FormatDate(Date date);

inline Date MakeDate(int year, unsigned month, unsigned day) {
  return std::chrono::year_month_day{std::chrono::year{year},
                                     std::chrono::month{month},
                                     std::chrono::day{day}};
}

// Signed day count b - a.
inline long DaysBetween(Date a, Date b) { return (b - a).count(); }

// Shifts by whole calendar years. Feb 29 maps to Feb 28 in non-leap years.
Date AddYears(Date date, int years);

// Completed years of age on `on` for someone born on `birth`.
int AgeInYears(Date birth, Date on);

}  // namespace eqodds

#endif  // EQODDS_DATE_H_

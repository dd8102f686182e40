#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace dlp {

using CivilDate = std::chrono::year_month_day;

enum class Granularity { DAILY, MONTHLY, HALF_YEARLY, ANNUAL };

// Strict ISO-8601 calendar date, YYYY-MM-DD. Rejects impossible dates.
std::optional<CivilDate> parse_date(std::string_view text);

std::string format_date(const CivilDate& date);

std::optional<Granularity> parse_granularity(std::string_view text);
std::string_view granularity_name(Granularity g);

// First day of the period containing `date` (Jan 1 / Jul 1 halves,
// first of month, Jan 1 years).
CivilDate period_start_of(const CivilDate& date, Granularity g);

// 0-based period count from `origin` to the period containing `date`.
// `origin` must itself be a period start. Negative if date precedes origin.
long period_index(const CivilDate& origin, const CivilDate& date, Granularity g);

// First day of period `index` counted from `origin`.
CivilDate period_start(const CivilDate& origin, long index, Granularity g);

} // namespace dlp

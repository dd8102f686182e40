#include "dlp/date.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace dlp {

namespace {

bool all_digits(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

int to_int(std::string_view s) {
    int value = 0;
    std::from_chars(s.data(), s.data() + s.size(), value);
    return value;
}

} // namespace

std::optional<CivilDate> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    const auto year = text.substr(0, 4);
    const auto month = text.substr(5, 2);
    const auto day = text.substr(8, 2);
    if (!all_digits(year) || !all_digits(month) || !all_digits(day)) {
        return std::nullopt;
    }
    const CivilDate date{std::chrono::year{to_int(year)},
                         std::chrono::month{static_cast<unsigned>(to_int(month))},
                         std::chrono::day{static_cast<unsigned>(to_int(day))}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

std::string format_date(const CivilDate& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::optional<Granularity> parse_granularity(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "daily") return Granularity::DAILY;
    if (lower == "monthly") return Granularity::MONTHLY;
    if (lower == "half_yearly" || lower == "half-yearly") return Granularity::HALF_YEARLY;
    if (lower == "annual") return Granularity::ANNUAL;
    return std::nullopt;
}

std::string_view granularity_name(Granularity g) {
    switch (g) {
    case Granularity::DAILY: return "DAILY";
    case Granularity::MONTHLY: return "MONTHLY";
    case Granularity::HALF_YEARLY: return "HALF_YEARLY";
    case Granularity::ANNUAL: return "ANNUAL";
    }
    return "ANNUAL";
}

CivilDate period_start_of(const CivilDate& date, Granularity g) {
    const auto year = date.year();
    switch (g) {
    case Granularity::DAILY:
        return date;
    case Granularity::MONTHLY:
        return {year, date.month(), std::chrono::day{1}};
    case Granularity::HALF_YEARLY: {
        const unsigned month = static_cast<unsigned>(date.month()) >= 7 ? 7 : 1;
        return {year, std::chrono::month{month}, std::chrono::day{1}};
    }
    case Granularity::ANNUAL:
        return {year, std::chrono::January, std::chrono::day{1}};
    }
    return date;
}

long period_index(const CivilDate& origin, const CivilDate& date, Granularity g) {
    switch (g) {
    case Granularity::DAILY: {
        const auto diff = std::chrono::sys_days{date} - std::chrono::sys_days{origin};
        return diff.count();
    }
    case Granularity::MONTHLY: {
        const long months_o = static_cast<int>(origin.year()) * 12L +
                              static_cast<long>(static_cast<unsigned>(origin.month())) - 1;
        const long months_d = static_cast<int>(date.year()) * 12L +
                              static_cast<long>(static_cast<unsigned>(date.month())) - 1;
        return months_d - months_o;
    }
    case Granularity::HALF_YEARLY: {
        const auto halves = [](const CivilDate& d) {
            return static_cast<int>(d.year()) * 2L +
                   (static_cast<unsigned>(d.month()) >= 7 ? 1 : 0);
        };
        return halves(date) - halves(origin);
    }
    case Granularity::ANNUAL:
        return static_cast<long>(static_cast<int>(date.year())) -
               static_cast<int>(origin.year());
    }
    return 0;
}

CivilDate period_start(const CivilDate& origin, long index, Granularity g) {
    switch (g) {
    case Granularity::DAILY:
        return CivilDate{std::chrono::sys_days{origin} + std::chrono::days{index}};
    case Granularity::MONTHLY: {
        const long months = static_cast<int>(origin.year()) * 12L +
                            static_cast<long>(static_cast<unsigned>(origin.month())) - 1 + index;
        const long year = months / 12;
        const unsigned month = static_cast<unsigned>(months % 12) + 1;
        return {std::chrono::year{static_cast<int>(year)}, std::chrono::month{month},
                std::chrono::day{1}};
    }
    case Granularity::HALF_YEARLY: {
        const long halves = static_cast<int>(origin.year()) * 2L +
                            (static_cast<unsigned>(origin.month()) >= 7 ? 1 : 0) + index;
        const long year = halves / 2;
        const unsigned month = (halves % 2 != 0) ? 7 : 1;
        return {std::chrono::year{static_cast<int>(year)}, std::chrono::month{month},
                std::chrono::day{1}};
    }
    case Granularity::ANNUAL:
        return {origin.year() + std::chrono::years{index}, std::chrono::January,
                std::chrono::day{1}};
    }
    return origin;
}

} // namespace dlp

#include "dlp/records.hpp"

#include "dlp/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

namespace dlp {

namespace {

constexpr std::string_view kCsvHeader = "user_id,date,duration_min";

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_duration(std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

bool csv_safe(std::string_view user_id) {
    return user_id.find_first_of(",\n\r") == std::string_view::npos;
}

void reject(ParseResult& out, std::size_t line, RowFault fault, std::string detail) {
    out.rejected.push_back({line, fault, std::move(detail)});
}

// Validates the common field triple and either appends a record or a
// row error.
void finish_row(ParseResult& out, std::size_t line, std::string_view user_raw,
                std::string_view date_raw, std::optional<double> duration) {
    const auto user = trim(user_raw);
    if (!duration) {
        reject(out, line, RowFault::MalformedRow, "non-numeric duration");
        return;
    }
    const auto date = parse_date(trim(date_raw));
    if (!date) {
        reject(out, line, RowFault::MalformedRow, "unparseable date");
        return;
    }
    if (user.empty()) {
        reject(out, line, RowFault::EmptyUserId, "empty user_id");
        return;
    }
    if (!csv_safe(user)) {
        reject(out, line, RowFault::MalformedRow, "user_id contains reserved character");
        return;
    }
    if (*duration < 0.0) {
        reject(out, line, RowFault::NegativeDuration, "negative duration");
        return;
    }
    out.records.push_back({std::string(user), *date, *duration});
}

void parse_csv_line(ParseResult& out, std::size_t line_no, std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (fields.size() != 3) {
        reject(out, line_no, RowFault::MalformedRow, "expected 3 fields");
        return;
    }
    finish_row(out, line_no, fields[0], fields[1], parse_duration(trim(fields[2])));
}

void parse_jsonl_line(ParseResult& out, std::size_t line_no, std::string_view line) {
    const auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        reject(out, line_no, RowFault::MalformedRow, "not a JSON object");
        return;
    }
    if (!doc.contains("user_id") || !doc.contains("date") || !doc.contains("duration_min")) {
        reject(out, line_no, RowFault::MalformedRow, "missing key");
        return;
    }
    if (!doc["user_id"].is_string() || !doc["date"].is_string() ||
        !doc["duration_min"].is_number()) {
        reject(out, line_no, RowFault::MalformedRow, "wrong field type");
        return;
    }
    finish_row(out, line_no, doc["user_id"].get<std::string>(),
               doc["date"].get<std::string>(), doc["duration_min"].get<double>());
}

} // namespace

std::string_view fault_name(RowFault fault) {
    switch (fault) {
    case RowFault::MalformedRow: return "MalformedRow";
    case RowFault::NegativeDuration: return "NegativeDuration";
    case RowFault::EmptyUserId: return "EmptyUserId";
    }
    return "MalformedRow";
}

ParseResult parse_records(std::string_view input, InputFormat format) {
    ParseResult out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool first_content_line = true;
    while (pos <= input.size()) {
        if (pos == input.size()) {
            break;
        }
        ++line_no;
        auto eol = input.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = input.size();
        }
        auto line = input.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty()) {
            continue;
        }
        if (format == InputFormat::CSV && first_content_line && trim(line) == kCsvHeader) {
            first_content_line = false;
            continue;
        }
        first_content_line = false;
        if (format == InputFormat::CSV) {
            parse_csv_line(out, line_no, line);
        } else {
            parse_jsonl_line(out, line_no, line);
        }
    }
    return out;
}

ParseResult parse_records(std::istream& input, InputFormat format) {
    std::ostringstream buffer;
    buffer << input.rdbuf();
    const std::string content = buffer.str();
    return parse_records(std::string_view(content), format);
}

std::vector<double> UserSeries::times() const {
    std::vector<double> t(values.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = static_cast<double>(i);
    }
    return t;
}

std::map<std::string, UserSeries> aggregate(const std::vector<AccessRecord>& records,
                                            Granularity granularity,
                                            std::optional<DateRange> range) {
    if (records.empty() && !range) {
        throw EmptyInput("aggregate: no records and no range");
    }
    DateRange effective;
    if (range) {
        effective = *range;
    } else {
        auto lo = records.front().date;
        auto hi = records.front().date;
        for (const auto& r : records) {
            const std::chrono::sys_days d{r.date};
            if (d < std::chrono::sys_days{lo}) lo = r.date;
            if (d > std::chrono::sys_days{hi}) hi = r.date;
        }
        effective = {lo, hi};
    }
    if (std::chrono::sys_days{effective.first} > std::chrono::sys_days{effective.second}) {
        throw InvalidConfig("aggregate: range start after range end");
    }

    const CivilDate origin = period_start_of(effective.first, granularity);
    const long n_periods = period_index(origin, effective.second, granularity) + 1;

    std::map<std::string, UserSeries> series;
    for (const auto& r : records) {
        const std::chrono::sys_days d{r.date};
        if (d < std::chrono::sys_days{effective.first} ||
            d > std::chrono::sys_days{effective.second}) {
            continue;
        }
        auto [it, inserted] = series.try_emplace(r.user_id);
        if (inserted) {
            it->second.user_id = r.user_id;
            it->second.granularity = granularity;
            it->second.origin = origin;
            it->second.values.assign(static_cast<std::size_t>(n_periods), 0.0);
        }
        const long idx = period_index(origin, r.date, granularity);
        it->second.values[static_cast<std::size_t>(idx)] += r.duration_min;
    }
    return series;
}

} // namespace dlp

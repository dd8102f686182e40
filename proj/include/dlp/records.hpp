#pragma once

#include "dlp/date.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dlp {

// One raw access event: who touched the data, when, and for how long.
struct AccessRecord {
    std::string user_id;
    CivilDate date{};
    double duration_min = 0.0; // minutes, >= 0
};

// Per-user, gap-filled series of total access minutes per period.
// Period t is the 0-based index from `origin`; times() is just 0..n-1.
struct UserSeries {
    std::string user_id;
    Granularity granularity = Granularity::ANNUAL;
    CivilDate origin{};
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    std::vector<double> times() const;
};

enum class InputFormat { CSV, JSONL };

enum class RowFault { MalformedRow, NegativeDuration, EmptyUserId };

struct RowError {
    std::size_t line = 0; // 1-based
    RowFault fault = RowFault::MalformedRow;
    std::string detail;
};

struct ParseResult {
    std::vector<AccessRecord> records;
    std::vector<RowError> rejected;
};

std::string_view fault_name(RowFault fault);

// Parses CSV or JSONL access-log content. A bad row is reported in
// `rejected` with its line number and never aborts the parse. A leading
// CSV header line ("user_id,date,duration_min") is skipped when present.
ParseResult parse_records(std::string_view input, InputFormat format);
ParseResult parse_records(std::istream& input, InputFormat format);

using DateRange = std::pair<CivilDate, CivilDate>;

// Buckets each user's durations into fixed-granularity periods covering
// `range` (default: [min date, max date] over all records). Periods with
// no records are filled with 0. Records outside an explicit range are
// dropped.
std::map<std::string, UserSeries> aggregate(const std::vector<AccessRecord>& records,
                                            Granularity granularity,
                                            std::optional<DateRange> range = std::nullopt);

} // namespace dlp

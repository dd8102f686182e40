#include "dlp/numfmt.hpp"

#include <charconv>

namespace dlp {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string();
}

} // namespace dlp

#pragma once

#include <optional>
#include <string>

namespace dlp {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Empty string for absent optionals (the CSV convention everywhere).
std::string format_optional(const std::optional<double>& value);

} // namespace dlp

#ifndef VIZCOT_COMMON_STRINGS_H_
#define VIZCOT_COMMON_STRINGS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizcot {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Parses a complete decimal number ("12", "-3.5", "1e3"). Leading and
/// trailing blanks are not accepted.
std::optional<double> parse_number(std::string_view s);

/// Shortest round-trippable text for a double; integral values print without
/// a fractional part ("1999", not "1999.0").
std::string format_number(double v);

/// Collapses runs of whitespace to one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

}  // namespace vizcot

#endif  // VIZCOT_COMMON_STRINGS_H_

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace xurdf {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict decimal parse: the whole of `text` (surrounding blanks allowed)
/// must be one finite number.
std::optional<double> parse_double(std::string_view text);

}  // namespace xurdf

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bdl {

/// `key = value` lines in file order. Blank lines and `#` comments are
/// skipped; keys may repeat. Throws ConfigError naming the line on a line
/// without '='.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

std::string read_text_file(const std::string& path);

/// Strict numeric conversions that name the key in their ConfigError.
long long parse_integer(std::string_view key, std::string_view value);
double parse_real(std::string_view key, std::string_view value);

}  // namespace bdl

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace viewsim::csv {

// Reals are written with six fixed decimals so equal results are equal
// bytes; undefined values render as "na".
std::string format_real(double v);
std::string format_opt(const std::optional<double>& v);

// Quote a field when needed (comma, quote, newline), RFC 4180 style.
std::string quote(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

// Minimal RFC 4180 reader; returns rows of unquoted fields.
std::vector<std::vector<std::string>> parse(std::string_view text);

} // namespace viewsim::csv

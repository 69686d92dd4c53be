#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bresse::csv {

/// Shortest decimal representation that round-trips, '.' separator.
std::string format(double v);
std::string format(long long v);
inline std::string format(int v) { return format(static_cast<long long>(v)); }

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

/// Splits one record, honouring double-quoted fields.
std::vector<std::string> split_row(std::string_view line);

/// Parses a double; throws InvalidInput on malformed text.
double parse_double(std::string_view text);

}  // namespace bresse::csv

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fimpkit::csv {

using Row = std::vector<std::string>;

/// Reads delimited UTF-8 text with RFC 4180 quoting. Blank lines and lines
/// starting with '#' are skipped. A leading UTF-8 BOM is dropped.
std::vector<Row> read(std::istream& in, char delimiter = ',');
std::vector<Row> read_file(const std::string& path, char delimiter = ',');

/// Quotes a field when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');
void write_row(std::ostream& out, const Row& row, char delimiter = ',');

/// Fixed 9-significant-digit rendering used by every report writer so that
/// reruns are byte-identical.
std::string format_number(double value);

/// Rounds to the value `format_number` would print.
double round_significant(double value);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace fimpkit::csv

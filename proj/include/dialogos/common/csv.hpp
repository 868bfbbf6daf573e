#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dialogos::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks. A trailing newline does not produce an empty row. Throws
// ParseError on an unterminated quote.
std::vector<Row> parse(std::string_view content);
std::vector<Row> read_file(const std::string& path);

enum class Quoting { minimal, all };

std::string format_row(const Row& row, Quoting quoting = Quoting::minimal);
void write_row(std::ostream& out, const Row& row, Quoting quoting = Quoting::minimal);

}  // namespace dialogos::csv

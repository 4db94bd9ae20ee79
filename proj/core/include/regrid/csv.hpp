#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace regrid::csv {

struct Row {
    std::size_t line = 0; // 1-based physical line where the row starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF, embedded newlines.
/// Blank lines are skipped.
std::vector<Row> read(std::istream& in);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

} // namespace regrid::csv

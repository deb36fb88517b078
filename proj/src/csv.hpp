#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace socbench::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may hold separators, doubled quotes and
/// line breaks. Accepts LF or CRLF and a leading UTF-8 BOM. Throws
/// SchemaViolation on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes the field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

}  // namespace socbench::csv

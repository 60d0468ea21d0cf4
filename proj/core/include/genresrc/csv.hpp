#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace genresrc::csv {

// Quotes the field only when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split(std::string_view line);

// Shortest text that parses back to the same double.
std::string format_double(double value);

// Always 17 significant digits; used for persisted model matrices.
std::string format_double17(double value);

double parse_double(std::string_view text);

}  // namespace genresrc::csv

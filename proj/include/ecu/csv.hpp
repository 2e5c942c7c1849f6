#pragma once

// Minimal RFC 4180 reading and writing: quoted fields, doubled quotes,
// LF or CRLF line ends.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecu::csv {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Row = std::vector<std::string>;

std::string escape(std::string_view field);
/// Fields joined by commas, terminated by "\n".
std::string format_row(const Row& fields);
std::vector<Row> parse(std::string_view text);

/// Index of `name` in a header row; throws CsvError when absent.
std::size_t column(const Row& header, std::string_view name);

}  // namespace ecu::csv

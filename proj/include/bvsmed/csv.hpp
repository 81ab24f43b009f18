#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bvsmed::csv {

/// Header plus string cells of an RFC-4180 file.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column or -1.
  [[nodiscard]] long column(std::string_view name) const;
};

/// Parses RFC-4180 text (quoted fields, doubled quotes, CRLF or LF). The first
/// record is the header; every row must have the header's width.
Table parse(std::string_view text);

Table read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a delimiter, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Strict parse of a whole cell as a double; false on any trailing junk.
bool parse_double(std::string_view cell, double& value);

}  // namespace bvsmed::csv

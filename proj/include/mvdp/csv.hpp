#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mvdp::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column position of `name`, or -1.
  int column(std::string_view name) const;
};

// Reads a comma-separated file with a header row. Double-quoted fields with
// "" escapes are supported; a trailing '\r' is stripped from each line.
// Throws IoError when the file cannot be opened and ParseError on a row whose
// field count differs from the header.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text, std::string_view source_name = "<memory>");

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
// Strict full-field parse; throws ParseError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace mvdp::csv

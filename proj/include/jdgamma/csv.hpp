#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jdgamma {

inline constexpr std::string_view kVersion = JDGAMMA_VERSION;

//! Shortest decimal text that parses back to the same double; "nan"/"inf".
std::string format_double(double value);

//! Parses a whole field as a double (surrounding blanks allowed).
bool parse_double(std::string_view text, double& out);

using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

/// "# key: value" lines. Every artifact starts with the tool version, the
/// config echo and the seed in this form; readers skip '#' lines.
void write_comment_header(std::ostream& out, const HeaderEntries& entries);

//! Splits one CSV line on commas, trimming blanks and surrounding quotes.
std::vector<std::string> split_csv_line(std::string_view line);

struct SeriesSchema
{
  std::string value_column; // empty: last column
  std::string time_column;  // empty: no time column
};

struct SeriesData
{
  std::vector<double> values;
  std::vector<std::string> times; // raw time labels when a time column is used
  std::vector<std::size_t> lines; // 1-based file line of each value
};

/// Reads one numeric column of a headed CSV file. Blank lines and '#'
/// comments are skipped. Errors (DataError, with the file line where one
/// applies): unreadable file, no data rows, unparseable value, time column
/// not strictly increasing, fewer than 4 rows. Unknown column names are a
/// ConfigError.
SeriesData ingest_series(const std::filesystem::path& path, const SeriesSchema& schema);

//! Simple column-oriented writer: header row, then rows of doubles/strings.
class CsvWriter
{
public:
  explicit CsvWriter(std::ostream& out);

  void header(const std::vector<std::string>& columns);
  CsvWriter& field(double value);
  CsvWriter& field(std::string_view text);
  CsvWriter& field(std::size_t value);
  void end_row();

private:
  std::ostream& out_;
  bool first_ = true;
};

} // namespace jdgamma

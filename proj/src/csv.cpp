#include "jdgamma/csv.hpp"

#include "jdgamma/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace jdgamma {

namespace {

std::string_view trim(std::string_view s)
{
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && blank(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && blank(s.back()))
    s.remove_suffix(1);
  return s;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name)
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw ConfigError("column '" + name + "' not found in CSV header");
  return static_cast<std::size_t>(it - header.begin());
}

bool time_before(const std::string& a, const std::string& b)
{
  double da = 0.0, db = 0.0;
  if (parse_double(a, da) && parse_double(b, db))
    return da < db;
  return a < b;
}

} // namespace

std::string format_double(double value)
{
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out)
{
  text = trim(text);
  if (text.empty())
    return false;
  if (text.front() == '+')
    text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

void write_comment_header(std::ostream& out, const HeaderEntries& entries)
{
  for (const auto& [key, value] : entries)
    out << "# " << key << ": " << value << '\n';
}

std::vector<std::string> split_csv_line(std::string_view line)
{
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view f =
        trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                : comma - start));
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"')
      f = f.substr(1, f.size() - 2);
    fields.emplace_back(f);
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return fields;
}

SeriesData ingest_series(const std::filesystem::path& path, const SeriesSchema& schema)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open input file '" + path.string() + "'");

  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    header = split_csv_line(t);
    break;
  }
  if (header.empty())
    throw DataError("no data rows in '" + path.string() + "' (file is empty)");

  const std::size_t value_col =
      schema.value_column.empty() ? header.size() - 1 : find_column(header, schema.value_column);
  const bool has_time = !schema.time_column.empty();
  const std::size_t time_col = has_time ? find_column(header, schema.time_column) : 0;

  SeriesData data;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    const auto fields = split_csv_line(t);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (fields.size() <= std::max(value_col, time_col))
      throw DataError(where + ": too few fields in row '" + std::string(t) + "'", lineno);
    double v = 0.0;
    if (!parse_double(fields[value_col], v) || !std::isfinite(v))
      throw DataError(where + ": cannot parse value '" + fields[value_col] + "' in row '" +
                          std::string(t) + "'",
                      lineno);
    if (has_time) {
      if (!data.times.empty() && !time_before(data.times.back(), fields[time_col]))
        throw DataError(where + ": time '" + fields[time_col] +
                            "' does not increase (previous '" + data.times.back() + "')",
                        lineno);
      data.times.push_back(fields[time_col]);
    }
    data.values.push_back(v);
    data.lines.push_back(lineno);
  }
  if (data.values.empty())
    throw DataError("no data rows in '" + path.string() + "'");
  if (data.values.size() < 4)
    throw DataError("'" + path.string() + "' has " + std::to_string(data.values.size()) +
                    " data rows; at least 4 are needed");
  return data;
}

CsvWriter::CsvWriter(std::ostream& out)
  : out_(out)
{}

void CsvWriter::header(const std::vector<std::string>& columns)
{
  for (const auto& c : columns)
    field(std::string_view(c));
  end_row();
}

CsvWriter& CsvWriter::field(double value)
{
  return field(std::string_view(format_double(value)));
}

CsvWriter& CsvWriter::field(std::string_view text)
{
  if (!first_)
    out_ << ',';
  out_ << text;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::field(std::size_t value)
{
  return field(std::string_view(std::to_string(value)));
}

void CsvWriter::end_row()
{
  out_ << '\n';
  first_ = true;
}

} // namespace jdgamma

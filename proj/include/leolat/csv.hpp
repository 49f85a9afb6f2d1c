#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "leolat/errors.hpp"

namespace leolat::csv {

// Plain comma-separated rows: no quoting, no embedded commas.
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    std::string_view cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string row_error(const std::string& source, std::size_t row, const std::string& what) {
  std::ostringstream msg;
  msg << source << ": row " << row << ": " << what;
  return msg.str();
}

inline double parse_double(const std::string& cell, const std::string& source, std::size_t row,
                           const std::string& column) {
  std::string_view s = cell;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(row_error(source, row, "cannot parse " + column + " '" + cell + "'"));
  return v;
}

// Header-indexed table. Row numbers count the header as row 1.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;
  std::string source;

  // Index of a required column, or ParseError naming it.
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ParseError(source + ": missing header column '" + name + "'");
  }
  bool has_column(const std::string& name) const {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  }
};

inline Table read_table(std::istream& in, const std::string& source) {
  Table t;
  t.source = source;
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!have_header) {
      t.header = split(line);
      have_header = true;
      continue;
    }
    auto cells = split(line);
    if (cells.size() < t.header.size())
      throw ParseError(row_error(source, row, "expected " + std::to_string(t.header.size()) + " fields"));
    t.rows.push_back(std::move(cells));
    t.row_numbers.push_back(row);
  }
  if (!have_header) throw ParseError(source + ": missing header");
  return t;
}

inline Table read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_table(in, path);
}

// Shortest decimal text that parses back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace leolat::csv

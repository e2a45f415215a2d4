#pragma once

// CSV dialect: comma separated, '.' decimal point, header on the first line.
// Numbers go through std::to_chars / std::from_chars, which ignore the locale
// and round-trip doubles exactly.

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fraclossy/errors.hpp"

namespace fraclossy::csv {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw NumericalError("csv: cannot format number");
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

inline void write(std::ostream& os, const Table& t) {
  if (t.header.size() != t.columns.size()) throw DomainError("csv: header and column counts differ");
  for (const auto& c : t.columns)
    if (c.size() != t.rows()) throw DomainError("csv: ragged columns");
  for (std::size_t j = 0; j < t.header.size(); ++j) os << (j ? "," : "") << t.header[j];
  os << '\n';
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << format_number(t.columns[j][i]);
    os << '\n';
  }
}

inline Table read(std::istream& is) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (t.header.empty()) {
      for (auto f : fields) t.header.emplace_back(f);
      t.columns.resize(t.header.size());
      continue;
    }
    if (fields.size() != t.header.size())
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                        " fields");
    for (std::size_t j = 0; j < fields.size(); ++j) {
      try {
        t.columns[j].push_back(parse_number(fields[j]));
      } catch (const ConfigError& e) {
        throw ConfigError("csv line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  if (t.header.empty()) throw ConfigError("csv: empty input");
  return t;
}

}  // namespace fraclossy::csv

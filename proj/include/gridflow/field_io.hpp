#pragma once

// Field snapshot files:
//
//   gridflow-field n=<n> L=<L> t=<t>
//   <n lines of n comma-separated values>
//
// Line j holds y-index j, entries ordered by x-index. Numbers are written in
// shortest round-trip form, so reading a file back reproduces every bit.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

#include "gridflow/grid.hpp"

namespace gridflow {

struct FieldSnapshot {
  CellField field;
  double time;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw FormatError("cannot format value");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("malformed number '" + std::string(s) + "'");
  return v;
}

inline std::string_view header_value(std::string_view line, std::string_view key) {
  const std::string tag = " " + std::string(key) + "=";
  const auto pos = line.find(tag);
  if (pos == std::string_view::npos) throw FormatError("missing header key " + std::string(key));
  auto rest = line.substr(pos + tag.size());
  return rest.substr(0, rest.find(' '));
}

}  // namespace detail

inline void write_field(std::ostream& os, const CellField& u, double time) {
  const int n = u.n();
  os << "gridflow-field n=" << n << " L=" << detail::format_double(u.grid().length())
     << " t=" << detail::format_double(time) << '\n';
  std::string line;
  for (int j = 0; j < n; ++j) {
    line.clear();
    for (int i = 0; i < n; ++i) {
      if (i) line += ',';
      line += detail::format_double(u(i, j));
    }
    line += '\n';
    os << line;
  }
}

inline FieldSnapshot read_field(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("empty field file");
  if (header.rfind("gridflow-field", 0) != 0) throw FormatError("not a gridflow-field file");
  const auto n_text = detail::header_value(header, "n");
  int n = 0;
  auto [p, ec] = std::from_chars(n_text.data(), n_text.data() + n_text.size(), n);
  if (ec != std::errc() || p != n_text.data() + n_text.size())
    throw FormatError("malformed grid size");
  const double length = detail::parse_double(detail::header_value(header, "L"));
  const double time = detail::parse_double(detail::header_value(header, "t"));

  FieldSnapshot snap{CellField(GridSpec(n, length)), time};
  std::string line;
  for (int j = 0; j < n; ++j) {
    if (!std::getline(is, line)) throw FormatError("truncated field file");
    std::string_view rest(line);
    for (int i = 0; i < n; ++i) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (i == n - 1))
        throw FormatError("wrong number of values on line " + std::to_string(j + 2));
      snap.field(i, j) = detail::parse_double(rest.substr(0, comma));
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
  }
  return snap;
}

inline void save_field(const std::string& path, const CellField& u, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_field(os, u, time);
  if (!os) throw Error("failed writing " + path);
}

inline FieldSnapshot load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_field(is);
}

}  // namespace gridflow

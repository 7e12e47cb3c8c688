#pragma once

// Small text helpers shared by the file formats: whole-file I/O, strict
// integer parsing, CSV field splitting and locale-independent number output.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "netcpd/error.hpp"

namespace netcpd::text {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return data;
}

inline void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

/// Parses a whole field as a base-10 integer; no sign other than a leading '-',
/// no whitespace.
inline bool parse_int(std::string_view field, std::int64_t& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

inline bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Splits on LF. A trailing CR is stripped from every line; a final empty
/// line produced by a terminating LF is dropped.
inline std::vector<std::string_view> lines(std::string_view data) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t pos = data.find('\n', start);
    if (pos == std::string_view::npos) pos = data.size();
    std::string_view line = data.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = pos + 1;
  }
  return out;
}

/// Shortest representation that round-trips; always uses '.' as separator.
inline std::string fmt(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

/// Fixed notation with `digits` decimals (for human-facing tables).
inline std::string fixed(double value, int digits) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace netcpd::text

#pragma once

// Dynamic network sequences: the AdjacencySequence container, the DNMT dense
// text format, the "t,i,j" edge-list CSV and minute-level aggregation of raw
// contact records.
//
// Time is 1-based everywhere in the public API (t = 1..T). Node ids are
// 0-based inside the library and 1-based in every file format.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "netcpd/error.hpp"
#include "netcpd/text_io.hpp"

namespace netcpd {

/// T symmetric 0/1 adjacency matrices of a common size n.
class AdjacencySequence {
 public:
  AdjacencySequence() = default;

  AdjacencySequence(int T, int n, bool self_loops = true)
      : T_(T), n_(n), self_loops_(self_loops) {
    if (T < 1) throw RangeError("AdjacencySequence: T must be >= 1");
    if (n < 2) throw RangeError("AdjacencySequence: n must be >= 2");
    data_.assign(static_cast<std::size_t>(T) * n * n, 0);
  }

  int T() const noexcept { return T_; }
  int n() const noexcept { return n_; }
  bool self_loops() const noexcept { return self_loops_; }

  int at(int t, int i, int j) const { return data_[offset(t, i, j)]; }

  /// Sets A_ij(t) and A_ji(t) together, so symmetry can never be broken.
  void set_edge(int t, int i, int j, bool value = true) {
    check_index(t, i, j);
    if (i == j && !self_loops_ && value) {
      throw RangeError("self-loop at node " + std::to_string(i + 1) +
                       " in a sequence without self-loops");
    }
    data_[offset(t, i, j)] = value ? 1 : 0;
    data_[offset(t, j, i)] = value ? 1 : 0;
  }

  /// Row-major n*n block of time t.
  const std::uint8_t* block(int t) const {
    check_index(t, 0, 0);
    return data_.data() + static_cast<std::size_t>(t - 1) * n_ * n_;
  }

  Eigen::MatrixXd matrix(int t) const {
    const std::uint8_t* b = block(t);
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = b[static_cast<std::size_t>(i) * n_ + j];
    return m;
  }

  /// True iff every block is symmetric, binary and (without self-loops) has a
  /// zero diagonal.
  bool valid() const {
    for (int t = 1; t <= T_; ++t) {
      const std::uint8_t* b = block(t);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          const auto v = b[static_cast<std::size_t>(i) * n_ + j];
          if (v > 1 || v != b[static_cast<std::size_t>(j) * n_ + i]) return false;
        }
        if (!self_loops_ && b[static_cast<std::size_t>(i) * n_ + i]) return false;
      }
    }
    return true;
  }

  friend bool operator==(const AdjacencySequence& a, const AdjacencySequence& b) {
    return a.T_ == b.T_ && a.n_ == b.n_ && a.data_ == b.data_;
  }

 private:
  void check_index(int t, int i, int j) const {
    if (t < 1 || t > T_ || i < 0 || i >= n_ || j < 0 || j >= n_) {
      throw RangeError("AdjacencySequence index out of range (t=" + std::to_string(t) +
                       ", i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")");
    }
  }
  std::size_t offset(int t, int i, int j) const {
    return (static_cast<std::size_t>(t - 1) * n_ + i) * n_ + j;
  }

  int T_ = 0;
  int n_ = 0;
  bool self_loops_ = true;
  std::vector<std::uint8_t> data_;
};

// ---------------------------------------------------------------------------
// DNMT: "<T> <n>\n" followed by T blocks of n lines, each exactly n chars of
// '0'/'1' and LF-terminated. No blank lines, no trailing data.

inline std::string to_dnmt(const AdjacencySequence& seq) {
  const int n = seq.n();
  std::string out = std::to_string(seq.T()) + ' ' + std::to_string(n) + '\n';
  out.reserve(out.size() + static_cast<std::size_t>(seq.T()) * n * (n + 1));
  for (int t = 1; t <= seq.T(); ++t) {
    const std::uint8_t* b = seq.block(t);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out.push_back(b[static_cast<std::size_t>(i) * n + j] ? '1' : '0');
      out.push_back('\n');
    }
  }
  return out;
}

namespace detail {

inline bool parse_header_count(std::string_view field, std::int64_t& out) {
  // Canonical decimal only, so that parse/print round-trips byte-exactly.
  if (field.empty() || field.size() > 9) return false;
  if (field.size() > 1 && field[0] == '0') return false;
  for (char c : field)
    if (c < '0' || c > '9') return false;
  return text::parse_int(field, out);
}

}  // namespace detail

/// Parses DNMT text. With self_loops = false a nonzero diagonal is rejected.
inline AdjacencySequence from_dnmt(std::string_view data, bool self_loops = true) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) -> bool {
    if (pos >= data.size()) return false;
    const std::size_t nl = data.find('\n', pos);
    ++line_no;
    if (nl == std::string_view::npos) {
      throw FormatError("missing LF terminator", line_no, data.size() - pos + 1);
    }
    line = data.substr(pos, nl - pos);
    pos = nl + 1;
    return true;
  };

  std::string_view header;
  if (!next_line(header)) throw FormatError("empty file, expected header \"<T> <n>\"", 1);
  const std::size_t space = header.find(' ');
  std::int64_t T = 0, n = 0;
  if (space == std::string_view::npos || !detail::parse_header_count(header.substr(0, space), T) ||
      !detail::parse_header_count(header.substr(space + 1), n)) {
    throw FormatError("malformed header, expected \"<T> <n>\"", 1);
  }
  if (T < 1) throw FormatError("header: T must be >= 1", 1);
  if (n < 2) throw FormatError("header: n must be >= 2", 1);

  AdjacencySequence seq(static_cast<int>(T), static_cast<int>(n), self_loops);
  std::vector<std::uint8_t> block(static_cast<std::size_t>(n * n));
  for (int t = 1; t <= T; ++t) {
    for (int i = 0; i < n; ++i) {
      std::string_view line;
      if (!next_line(line)) {
        throw FormatError("truncated file: expected row " + std::to_string(i + 1) + " of block " +
                              std::to_string(t),
                          line_no + 1);
      }
      if (line.size() != static_cast<std::size_t>(n)) {
        throw FormatError("row of block " + std::to_string(t) + " has " +
                              std::to_string(line.size()) + " characters, expected " +
                              std::to_string(n),
                          line_no);
      }
      for (int j = 0; j < n; ++j) {
        const char c = line[static_cast<std::size_t>(j)];
        if (c != '0' && c != '1') {
          throw FormatError(std::string("invalid character '") + c + "', expected '0' or '1'",
                            line_no, static_cast<std::size_t>(j) + 1);
        }
        const std::uint8_t v = c == '1';
        if (j < i && v != block[static_cast<std::size_t>(j) * n + i]) {
          throw AsymmetryError(static_cast<std::size_t>(t), static_cast<std::size_t>(i) + 1,
                               static_cast<std::size_t>(j) + 1, line_no);
        }
        if (i == j && v && !self_loops) {
          throw FormatError("nonzero diagonal in a sequence without self-loops", line_no,
                            static_cast<std::size_t>(j) + 1);
        }
        block[static_cast<std::size_t>(i) * n + j] = v;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        if (block[static_cast<std::size_t>(i) * n + j]) seq.set_edge(t, i, j);
  }
  if (pos != data.size()) throw FormatError("trailing data after last block", line_no + 1);
  return seq;
}

inline AdjacencySequence read_dnmt(const std::string& path, bool self_loops = true) {
  return from_dnmt(text::read_file(path), self_loops);
}

inline void write_dnmt(const AdjacencySequence& seq, const std::string& path) {
  text::write_file(path, to_dnmt(seq));
}

// ---------------------------------------------------------------------------
// Edge-list CSV: header "t,i,j", 1-based integer fields.

inline AdjacencySequence from_edgelist(std::string_view data, int T, int n, bool self_loops = false) {
  const auto rows = text::lines(data);
  if (rows.empty() || rows[0] != "t,i,j") throw FormatError("expected header \"t,i,j\"", 1);
  AdjacencySequence seq(T, n, self_loops);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line_no = r + 1;
    if (rows[r].empty()) continue;
    const auto fields = text::split(rows[r]);
    if (fields.size() != 3) throw FormatError("expected 3 fields", line_no);
    std::int64_t v[3];
    for (int f = 0; f < 3; ++f) {
      if (!text::parse_int(fields[static_cast<std::size_t>(f)], v[f])) {
        throw FormatError("non-integer field '" + std::string(fields[static_cast<std::size_t>(f)]) + "'",
                          line_no, static_cast<std::size_t>(f) + 1);
      }
    }
    if (v[0] < 1 || v[0] > T) throw FormatError("time index out of range [1," + std::to_string(T) + "]", line_no, 1);
    if (v[1] < 1 || v[1] > n) throw FormatError("node i out of range [1," + std::to_string(n) + "]", line_no, 2);
    if (v[2] < 1 || v[2] > n) throw FormatError("node j out of range [1," + std::to_string(n) + "]", line_no, 3);
    if (v[1] == v[2] && !self_loops) throw FormatError("self-loop row without self-loops enabled", line_no);
    seq.set_edge(static_cast<int>(v[0]), static_cast<int>(v[1] - 1), static_cast<int>(v[2] - 1));
  }
  return seq;
}

inline AdjacencySequence read_edgelist(const std::string& path, int T, int n, bool self_loops = false) {
  return from_edgelist(text::read_file(path), T, n, self_loops);
}

// ---------------------------------------------------------------------------
// Raw contact records.

struct ContactRecord {
  std::int64_t timestamp = 0;
  int i = 0;  ///< 1-based
  int j = 0;  ///< 1-based
};

inline std::vector<ContactRecord> parse_contacts(std::string_view data) {
  const auto rows = text::lines(data);
  if (rows.empty() || rows[0] != "timestamp,i,j") {
    throw FormatError("expected header \"timestamp,i,j\"", 1);
  }
  std::vector<ContactRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto fields = text::split(rows[r]);
    if (fields.size() != 3) throw FormatError("expected 3 fields", r + 1);
    std::int64_t v[3];
    for (int f = 0; f < 3; ++f) {
      if (!text::parse_int(fields[static_cast<std::size_t>(f)], v[f])) {
        throw FormatError("non-integer field", r + 1, static_cast<std::size_t>(f) + 1);
      }
    }
    out.push_back({v[0], static_cast<int>(v[1]), static_cast<int>(v[2])});
  }
  return out;
}

inline std::vector<ContactRecord> read_contacts(const std::string& path) {
  return parse_contacts(text::read_file(path));
}

/// Time anchor of the aggregation windows: the earliest timestamp.
inline std::int64_t contact_window_anchor(const std::vector<ContactRecord>& records) {
  if (records.empty()) throw DegenerateDataError("empty contact record list");
  return std::min_element(records.begin(), records.end(), [](const auto& a, const auto& b) {
           return a.timestamp < b.timestamp;
         })->timestamp;
}

/// Binarized window aggregation: A_ij(t) = 1 iff the pair {i,j} has at least
/// one record in window t = floor((timestamp - anchor) / window) + 1.
inline AdjacencySequence aggregate_contacts(const std::vector<ContactRecord>& records,
                                            std::int64_t window_seconds, int n,
                                            bool self_loops = false) {
  if (window_seconds <= 0) throw RangeError("window_seconds must be positive");
  const std::int64_t anchor = contact_window_anchor(records);
  std::int64_t last = anchor;
  for (const auto& r : records) {
    last = std::max(last, r.timestamp);
    if (r.i < 1 || r.i > n || r.j < 1 || r.j > n) {
      throw RangeError("contact node id out of range [1," + std::to_string(n) + "]");
    }
    if (r.i == r.j && !self_loops) throw RangeError("self-contact without self-loops enabled");
  }
  const std::int64_t T = (last - anchor) / window_seconds + 1;
  if (T > 100'000'000) throw RangeError("aggregation produces too many windows");
  AdjacencySequence seq(static_cast<int>(T), n, self_loops);
  for (const auto& r : records) {
    const auto t = static_cast<int>((r.timestamp - anchor) / window_seconds + 1);
    seq.set_edge(t, r.i - 1, r.j - 1);
  }
  return seq;
}

}  // namespace netcpd

#pragma once

// Evaluation of estimated change-points against the truth.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netcpd/error.hpp"
#include "netcpd/text_io.hpp"

namespace netcpd {

/// Normalized Hausdorff distance between two change-point sets. One empty side
/// gives 1, both empty gives 0.
inline double hausdorff(const std::vector<int>& eta, const std::vector<int>& eta_hat, int T) {
  if (T < 1) throw RangeError("hausdorff: T must be positive");
  if (eta.empty() && eta_hat.empty()) return 0.0;
  if (eta.empty() || eta_hat.empty()) return 1.0;
  auto directed = [](const std::vector<int>& a, const std::vector<int>& b) {
    int worst = 0;
    for (int x : a) {
      int nearest = std::abs(x - b.front());
      for (int y : b) nearest = std::min(nearest, std::abs(x - y));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(eta, eta_hat), directed(eta_hat, eta)) / static_cast<double>(T);
}

/// Segment label of every time 1..T: the number of change-points <= t.
inline std::vector<int> segment_labels(const std::vector<int>& eta, int T) {
  std::vector<int> labels(static_cast<std::size_t>(T));
  std::size_t k = 0;
  std::vector<int> sorted = eta;
  std::sort(sorted.begin(), sorted.end());
  for (int t = 1; t <= T; ++t) {
    while (k < sorted.size() && sorted[k] <= t) ++k;
    labels[static_cast<std::size_t>(t) - 1] = static_cast<int>(k);
  }
  return labels;
}

/// Adjusted Rand index between the segmentations of {1..T} induced by the two
/// change-point sets. Not clamped; identical single-segment partitions give 1.
inline double ari(const std::vector<int>& eta, const std::vector<int>& eta_hat, int T) {
  if (T < 1) throw RangeError("ari: T must be positive");
  const auto a = segment_labels(eta, T);
  const auto b = segment_labels(eta_hat, T);
  std::map<std::pair<int, int>, std::int64_t> table;
  std::map<int, std::int64_t> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++table[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  auto c2 = [](std::int64_t x) { return static_cast<double>(x) * static_cast<double>(x - 1) / 2.0; };
  double index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [key, v] : table) index += c2(v);
  for (const auto& [key, v] : rows) sum_a += c2(v);
  for (const auto& [key, v] : cols) sum_b += c2(v);
  const double total = c2(T);
  const double expected = total > 0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

struct EvalRow {
  int k_diff = 0;
  double hausdorff_norm = 0;
  std::optional<double> hausdorff_star;  ///< present iff k_diff == 0
  double ari = 0;
  double runtime_seconds = 0;
  bool empty_convention = false;         ///< hausdorff came from the empty-set rule
};

inline EvalRow evaluate(const std::vector<int>& eta, const std::vector<int>& eta_hat, int T, double runtime_seconds = 0) {
  EvalRow row;
  row.k_diff = static_cast<int>(eta_hat.size()) - static_cast<int>(eta.size());
  row.hausdorff_norm = hausdorff(eta, eta_hat, T);
  row.empty_convention = eta.empty() != eta_hat.empty();
  if (row.k_diff == 0) row.hausdorff_star = row.hausdorff_norm;
  row.ari = ari(eta, eta_hat, T);
  row.runtime_seconds = runtime_seconds;
  return row;
}

inline constexpr std::array<const char*, 6> kDiffBins = {"<=-2", "-1", "0", "1", "2", ">=3"};

inline std::size_t k_diff_bin(int k_diff) {
  return static_cast<std::size_t>(std::clamp(k_diff, -2, 3) + 2);
}

struct BenchmarkTable {
  std::string method;
  std::size_t reps = 0;
  std::array<std::size_t, 6> k_diff_counts{};
  std::optional<double> mean_hausdorff;       ///< mean H * 100 / T; blank if any row used the empty-set rule
  std::optional<double> mean_hausdorff_star;  ///< over k_diff == 0 rows
  double mean_ari = 0;
  double mean_runtime = 0;
  std::size_t failed = 0;                     ///< reps that raised instead of producing a row
};

inline BenchmarkTable summarize(const std::vector<EvalRow>& rows, std::string method = "RID") {
  if (rows.empty()) throw RangeError("summarize: no rows");
  BenchmarkTable tab;
  tab.method = std::move(method);
  tab.reps = rows.size();
  double h = 0, hs = 0, a = 0, rt = 0;
  std::size_t n_star = 0;
  bool blank_h = false;
  for (const auto& r : rows) {
    ++tab.k_diff_counts[k_diff_bin(r.k_diff)];
    h += r.hausdorff_norm * 100.0;
    blank_h = blank_h || r.empty_convention;
    if (r.hausdorff_star) {
      hs += *r.hausdorff_star * 100.0;
      ++n_star;
    }
    a += r.ari;
    rt += r.runtime_seconds;
  }
  const double m = static_cast<double>(rows.size());
  if (!blank_h) tab.mean_hausdorff = h / m;
  if (n_star > 0) tab.mean_hausdorff_star = hs / static_cast<double>(n_star);
  tab.mean_ari = a / m;
  tab.mean_runtime = rt / m;
  return tab;
}

namespace detail {

inline std::string opt_fixed(const std::optional<double>& v, int digits) {
  return v ? text::fixed(*v, digits) : std::string();
}

}  // namespace detail

inline const char* benchmark_csv_header() {
  return "method,reps,kdiff_le_m2,kdiff_m1,kdiff_0,kdiff_1,kdiff_2,kdiff_ge_3,H,H_star,ARI,time_s,failed\n";
}

inline std::string benchmark_csv_row(const BenchmarkTable& t) {
  std::string out = t.method + "," + std::to_string(t.reps);
  for (auto c : t.k_diff_counts) out += "," + std::to_string(c);
  out += "," + detail::opt_fixed(t.mean_hausdorff, 3);
  out += "," + detail::opt_fixed(t.mean_hausdorff_star, 3);
  out += "," + text::fixed(t.mean_ari, 3);
  out += "," + text::fixed(t.mean_runtime, 3);
  out += "," + std::to_string(t.failed) + "\n";
  return out;
}

inline std::string to_csv(const std::vector<BenchmarkTable>& tables) {
  std::string out = benchmark_csv_header();
  for (const auto& t : tables) out += benchmark_csv_row(t);
  return out;
}

/// Aligned plain-text table with one row per method.
inline std::string to_text(const std::vector<BenchmarkTable>& tables) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"method", "<=-2", "-1", "0", "1", "2", ">=3", "H", "H*", "ARI", "time(s)"});
  for (const auto& t : tables) {
    std::vector<std::string> row{t.method};
    for (auto c : t.k_diff_counts) row.push_back(std::to_string(c));
    row.push_back(detail::opt_fixed(t.mean_hausdorff, 3));
    row.push_back(detail::opt_fixed(t.mean_hausdorff_star, 3));
    row.push_back(text::fixed(t.mean_ari, 3));
    row.push_back(text::fixed(t.mean_runtime, 3));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      const std::string pad(width[c] - row[c].size(), ' ');
      out += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

inline const char* eval_row_csv_header() { return "k_diff,hausdorff_norm,hausdorff_star,ari,runtime_seconds\n"; }

inline std::string eval_row_csv(const EvalRow& r) {
  return std::to_string(r.k_diff) + "," + text::fmt(r.hausdorff_norm) + "," +
         (r.hausdorff_star ? text::fmt(*r.hausdorff_star) : std::string()) + "," + text::fmt(r.ari) + "," +
         text::fmt(r.runtime_seconds) + "\n";
}

}  // namespace netcpd

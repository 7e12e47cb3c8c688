#pragma once

// Random interval sampling and the per-interval signal records shared by the
// distillation and threshold-selection stages.

#include <cstdint>
#include <utility>
#include <vector>

#include "netcpd/cusum.hpp"
#include "netcpd/error.hpp"
#include "netcpd/parallel.hpp"
#include "netcpd/rng.hpp"

namespace netcpd {

/// Half-open interval (s, e] with its signal max_{s<t<e} ||C(s,t,e)||.
struct SignalRecord {
  int s = 0;
  int e = 0;
  double signal = 0;

  friend bool operator==(const SignalRecord&, const SignalRecord&) = default;
};

/// M intervals with both endpoints drawn independently and uniformly from
/// {1..T}; each pair is stored as (min, max). Equal pairs are kept.
inline std::vector<std::pair<int, int>> sample_intervals(int T, int M, std::uint64_t seed) {
  if (T < 2) throw RangeError("sample_intervals: T must be >= 2");
  if (M < 1) throw RangeError("sample_intervals: M must be >= 1");
  Rng rng(seed);
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const auto a = static_cast<int>(rng.uniform_int(1, T));
    const auto b = static_cast<int>(rng.uniform_int(1, T));
    out.emplace_back(std::min(a, b), std::max(a, b));
  }
  return out;
}

/// Evaluates the signal of every interval, in parallel over intervals. The
/// output order matches `intervals` regardless of `threads`.
inline std::vector<SignalRecord> compute_signals(const CusumEngine& engine,
                                                 const std::vector<std::pair<int, int>>& intervals,
                                                 Norm norm, unsigned threads = 1) {
  std::vector<SignalRecord> out(intervals.size());
  parallel_for(intervals.size(), threads, [&](std::size_t m) {
    const auto [s, e] = intervals[m];
    out[m] = {s, e, engine.interval_signal(s, e, norm)};
  });
  return out;
}

}  // namespace netcpd

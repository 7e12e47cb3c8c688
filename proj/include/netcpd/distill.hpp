#pragma once

// Random interval distillation.
//
// Sampled intervals whose signal exceeds tau form the set S. A greedy pass
// over increasing right endpoints picks r_1 < r_2 < ..., each time dropping
// every interval that overlaps the shortest interval ending at r_i; the
// mirrored pass over decreasing left endpoints picks the l_j. Both passes
// select the same number K of endpoints (the maximum number of pairwise
// disjoint intervals in S) and l_j < r_j for every j, so [l_j, r_j] are the
// distilled intervals.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcpd/cusum.hpp"
#include "netcpd/error.hpp"
#include "netcpd/records.hpp"
#include "netcpd/threshold.hpp"

namespace netcpd {

struct DistilledInterval {
  int l = 0;
  int r = 0;
  friend bool operator==(const DistilledInterval&, const DistilledInterval&) = default;
};

struct DistillResult {
  int k_hat = 0;
  std::vector<DistilledInterval> intervals;  ///< sorted, disjoint, l < r
  friend bool operator==(const DistillResult&, const DistillResult&) = default;
};

/// (a,b] and (c,d] intersect iff a < d and c < b.
constexpr bool overlaps(int a, int b, int c, int d) noexcept { return a < d && c < b; }

/// Records with signal strictly above tau.
inline std::vector<SignalRecord> filter_by_threshold(const std::vector<SignalRecord>& records, double tau) {
  if (!(tau > 0)) throw RangeError("filter_by_threshold: tau must be positive");
  std::vector<SignalRecord> out;
  for (const auto& r : records)
    if (r.signal > tau) out.push_back(r);
  return out;
}

namespace detail {

struct Span {
  int u;
  int v;
};

inline void drop_overlapping(std::vector<Span>& set, int lo, int hi) {
  std::erase_if(set, [&](const Span& x) { return overlaps(x.u, x.v, lo, hi); });
}

}  // namespace detail

/// Greedy two-pass distillation of the selected set S. Empty intervals
/// (s >= e) are ignored.
inline DistillResult distill(const std::vector<SignalRecord>& selected) {
  std::vector<detail::Span> all;
  all.reserve(selected.size());
  for (const auto& r : selected)
    if (r.s < r.e) all.push_back({r.s, r.e});

  std::vector<int> rights;
  for (auto rest = all; !rest.empty();) {
    int r = rest.front().v;
    for (const auto& x : rest) r = std::min(r, x.v);
    int u_star = rest.front().u;
    bool first = true;
    for (const auto& x : rest) {
      if (x.v != r) continue;
      u_star = first ? x.u : std::max(u_star, x.u);
      first = false;
    }
    rights.push_back(r);
    detail::drop_overlapping(rest, u_star, r);
  }

  std::vector<int> lefts;
  for (auto rest = all; !rest.empty();) {
    int l = rest.front().u;
    for (const auto& x : rest) l = std::max(l, x.u);
    int v_star = 0;
    bool first = true;
    for (const auto& x : rest) {
      if (x.u != l) continue;
      v_star = first ? x.v : std::min(v_star, x.v);
      first = false;
    }
    lefts.push_back(l);
    detail::drop_overlapping(rest, l, v_star);
  }
  std::reverse(lefts.begin(), lefts.end());

  if (lefts.size() != rights.size()) {
    throw std::logic_error("distill: left and right passes disagree on K");
  }
  DistillResult out;
  out.k_hat = static_cast<int>(rights.size());
  for (std::size_t j = 0; j < rights.size(); ++j) {
    if (!(lefts[j] < rights[j])) throw std::logic_error("distill: l_j >= r_j for j = " + std::to_string(j + 1));
    out.intervals.push_back({lefts[j], rights[j]});
  }
  return out;
}

struct DistillOptions {
  int M = 500;
  std::optional<double> tau;  ///< fixed threshold; nullopt selects it from the data
  Norm norm = Norm::Operator;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct DistillOutcome {
  DistillResult result;
  std::vector<SignalRecord> records;               ///< all M sampled intervals
  double tau = 0;                                  ///< threshold actually used
  std::optional<ThresholdDiagnostics> threshold;   ///< present for automatic tau
};

/// sample -> signal -> (select tau) -> filter -> distill.
inline DistillOutcome run_distillation(const CusumEngine& engine, const DistillOptions& opt) {
  DistillOutcome out;
  const auto intervals = sample_intervals(engine.T(), opt.M, opt.seed);
  out.records = compute_signals(engine, intervals, opt.norm, opt.threads);
  if (opt.tau) {
    out.tau = *opt.tau;
  } else {
    out.threshold = select_tau(out.records, engine, opt.norm, opt.threads);
    out.tau = out.threshold->tau_selected;
  }
  out.result = distill(filter_by_threshold(out.records, out.tau));
  return out;
}

inline DistillOutcome run_distillation(const AdjacencySequence& seq, const DistillOptions& opt) {
  return run_distillation(CusumEngine(seq), opt);
}

}  // namespace netcpd

#pragma once

// Final change-point localization inside the distilled intervals.
//
// Index convention: C(s,t,e) contrasts (s,t] with (t,e], so a split at t
// estimates the last time of the old regime. Both localizers report
// eta_hat = t + 1, the first time of the new regime, which is how change-points
// are stored everywhere else in the library.
//
// localize_naive takes the operator-norm CUSUM argmax over each [l, r].
//
// localize_susvt pads each interval by Delta_hat/16, splits the padded
// interval into two interleaved grids of step 2g, denoises the even-grid CUSUM
// at the midpoint with USVT, and scans the odd-grid CUSUMs for the largest
// inner product with the denoised matrix. The split found there is refined by
// an operator-norm CUSUM argmax over (eta* - 2g, eta* + 2g).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netcpd/cusum.hpp"
#include "netcpd/distill.hpp"
#include "netcpd/error.hpp"
#include "netcpd/linalg.hpp"
#include "netcpd/parallel.hpp"

namespace netcpd {

struct LocalizeParams {
  double tau2_scale = 0.6;
  std::optional<double> tau3;  ///< nullopt means 3 / ln T
  double trim_fraction = 0.01;

  void validate() const {
    if (!(tau2_scale > 0)) throw RangeError("LocalizeParams: tau2_scale must be positive");
    if (tau3 && !(*tau3 > 0)) throw RangeError("LocalizeParams: tau3 must be positive");
    if (!(trim_fraction >= 0 && trim_fraction < 0.5)) throw RangeError("LocalizeParams: trim_fraction must lie in [0, 1/2)");
  }

  double tau3_for(int T) const { return tau3 ? *tau3 : 3.0 / std::log(static_cast<double>(T)); }

  /// g = round(tau3 ln T), at least 1.
  int grid_step(int T) const {
    const double raw = tau3_for(T) * std::log(static_cast<double>(T));
    return std::max(1, static_cast<int>(std::lround(raw)));
  }

  /// tau2 = tau2_scale * (sqrt(n) + sqrt(ln T)).
  double tau2(int n, int T) const {
    return tau2_scale * (std::sqrt(static_cast<double>(n)) + std::sqrt(std::log(static_cast<double>(T))));
  }
};

struct LocalizeStep {
  int k = 0;  ///< 1-based
  int l = 0, r = 0;
  int s = 0, e = 0, v = 0;
  double delta_hat = 0;
  double delta_tilde = 0;
  int eta_star = 0;       ///< raw split maximizing the inner product
  int eta_hat = 0;
  bool fallback = false;  ///< grid too short or USVT output zero; naive localization used
  std::vector<std::pair<int, double>> profile;  ///< (t, <Z^t, Y_hat>) over candidate t
};

struct LocalizeTrace {
  int g = 0;
  double tau2 = 0;
  std::vector<LocalizeStep> steps;
};

// ---------------------------------------------------------------------------
// Naive localization.

/// argmax_{l<t<r} ||C(l,t,r)||_op (smallest t on ties), reported as t + 1.
/// Returns nullopt when (l, r] has no interior split.
inline std::optional<int> naive_split(const CusumEngine& engine, int l, int r) {
  const auto prof = engine.signal_profile(l, r, Norm::Operator);
  if (prof.empty()) return std::nullopt;
  const auto best = std::max_element(prof.begin(), prof.end()) - prof.begin();
  return l + 1 + static_cast<int>(best) + 1;
}

/// Degenerate intervals (r - l <= 1) yield ceil((l + r) / 2).
inline std::vector<int> localize_naive(const CusumEngine& engine, const DistillResult& result) {
  std::vector<int> out;
  out.reserve(result.intervals.size());
  for (const auto& iv : result.intervals) {
    const auto t = naive_split(engine, iv.l, iv.r);
    out.push_back(t ? *t : (iv.l + iv.r + 1) / 2);
  }
  return out;
}

inline std::vector<int> localize_naive(const AdjacencySequence& seq, const DistillResult& result) {
  return localize_naive(CusumEngine(seq), result);
}

// ---------------------------------------------------------------------------
// SUSVT localization.

/// min over midpoint spacings, including (l_1+r_1)/2 - 1 and T + 1 - (l_K+r_K)/2.
inline double midpoint_spacing(const std::vector<DistilledInterval>& iv, int T) {
  if (iv.empty()) return T;
  auto mid = [](const DistilledInterval& x) { return 0.5 * (x.l + x.r); };
  double d = std::min(mid(iv.front()) - 1.0, T + 1.0 - mid(iv.back()));
  for (std::size_t k = 1; k < iv.size(); ++k) d = std::min(d, mid(iv[k]) - mid(iv[k - 1]));
  return d;
}

/// sqrt((j+1)(N-j)/(N+1)) for the even grid of (s, e] split at v.
inline double grid_scale(int s, int e, int v, int g) {
  const GridSplit gs = grid_split(s, e, v, g, Parity::Even);
  const double n_left = gs.split + 1;
  const double n_right = gs.last - gs.split;
  return std::sqrt(n_left * n_right / (gs.last + 1.0));
}

struct SusvtSplit {
  int eta_star = 0;
  double delta_tilde = 0;
  std::vector<std::pair<int, double>> profile;
};

/// Inner-product split search on (s, e] with denoising centre v. Returns
/// nullopt when the even grid cannot be split at v, when USVT removes the whole
/// spectrum, or when no candidate t has a non-degenerate odd-grid split.
inline std::optional<SusvtSplit> susvt_split(const CusumEngine& engine, int s, int e, int v, int g, double tau2,
                                             ClipBound clip, double trim_fraction) {
  const GridSplit even = grid_split(s, e, v, g, Parity::Even);
  if (even.last < 1 || even.degenerate()) return std::nullopt;

  SusvtSplit out;
  out.delta_tilde = grid_scale(s, e, v, g);
  const SymMatrix y_tilde = engine.subsampled_cusum(s, e, v, g, Parity::Even);
  const SymMatrix y_hat = usvt(y_tilde, tau2, clip);
  // no eigenvalue survived: every inner product is 0 and no split is preferred
  if (y_hat.dense().isZero(0.0)) return std::nullopt;

  const double width = static_cast<double>(e - s) * trim_fraction;
  const double lo = s + width;
  const double hi = e - width;
  std::map<int, double> by_split;
  bool found = false;
  double best = 0;
  for (int t = static_cast<int>(std::floor(lo)) + 1; t <= hi; ++t) {
    const GridSplit odd = grid_split(s, e, t, g, Parity::Odd);
    if (odd.last < 1 || odd.degenerate()) continue;
    auto it = by_split.find(odd.split);
    if (it == by_split.end()) {
      const double ip = inner_product(engine.subsampled_cusum(s, e, t, g, Parity::Odd), y_hat);
      it = by_split.emplace(odd.split, ip).first;
    }
    out.profile.emplace_back(t, it->second);
    if (!found || it->second > best) {
      best = it->second;
      out.eta_star = t;
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return out;
}

/// Padded interval, centre and parity-adjusted right end for interval k.
inline void susvt_bounds(LocalizeStep& st, int T, int g) {
  st.s = std::clamp(static_cast<int>(std::floor(st.l - st.delta_hat / 16.0)), 0, T);
  st.e = std::clamp(static_cast<int>(std::floor(st.r + st.delta_hat / 16.0)), 0, T);
  st.v = std::clamp((st.l + st.r) / 2, 0, T);
  if (st.e - st.s - 1 >= 0 && ((st.e - st.s - 1) / g) % 2 == 1) {
    st.e = st.e + g <= T ? st.e + g : st.e - g;
  }
}

inline std::pair<std::vector<int>, LocalizeTrace> localize_susvt(const CusumEngine& engine, const DistillResult& result,
                                                                  const LocalizeParams& params = {},
                                                                  unsigned threads = 1) {
  params.validate();
  const int T = engine.T();
  LocalizeTrace trace;
  trace.g = params.grid_step(T);
  trace.tau2 = params.tau2(engine.n(), T);
  const double delta_hat = midpoint_spacing(result.intervals, T);
  const int g = trace.g;

  trace.steps.resize(result.intervals.size());
  parallel_for(result.intervals.size(), threads, [&](std::size_t k) {
    LocalizeStep& st = trace.steps[k];
    st.k = static_cast<int>(k) + 1;
    st.l = result.intervals[k].l;
    st.r = result.intervals[k].r;
    st.delta_hat = delta_hat;
    susvt_bounds(st, T, g);

    std::optional<SusvtSplit> split;
    if (st.s < st.v && st.v < st.e) {
      try {
        const double dt = grid_scale(st.s, st.e, st.v, g);
        if (dt > 0) split = susvt_split(engine, st.s, st.e, st.v, g, trace.tau2, ClipBound::at(dt), params.trim_fraction);
      } catch (const DegenerateDataError&) {
        split.reset();
      }
    }
    if (!split) {
      st.fallback = true;
      const auto t = naive_split(engine, st.l, st.r);
      st.eta_star = t ? *t - 1 : (st.l + st.r) / 2;
      st.eta_hat = t ? *t : (st.l + st.r + 1) / 2;
      return;
    }
    st.delta_tilde = split->delta_tilde;
    st.eta_star = split->eta_star;
    st.profile = std::move(split->profile);

    // local refinement, window kept inside the padded interval
    const int a = std::max(st.eta_star - 2 * g, st.s);
    const int b = std::min(st.eta_star + 2 * g, st.e);
    const auto t = naive_split(engine, a, b);
    st.eta_hat = t ? *t : std::min(st.eta_star + 1, st.e);
  });

  std::vector<int> out;
  out.reserve(trace.steps.size());
  for (const auto& st : trace.steps) out.push_back(st.eta_hat);
  return {std::move(out), std::move(trace)};
}

inline std::pair<std::vector<int>, LocalizeTrace> localize_susvt(const AdjacencySequence& seq, const DistillResult& result,
                                                                  const LocalizeParams& params = {},
                                                                  unsigned threads = 1) {
  return localize_susvt(CusumEngine(seq), result, params, threads);
}

}  // namespace netcpd

#pragma once

// Data-driven threshold selection.
//
// tau_ref is a rule-of-thumb level: the largest CUSUM signal over all short
// windows (j, j+h], h = floor(3 ln T), inflated by e_T = ln(ln T)/2. The
// selected threshold is the boundary between the two density-peaks clusters
// of the interval signals when it falls inside [0.1 tau_ref, 10 tau_ref], and
// tau_ref itself otherwise.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "netcpd/cusum.hpp"
#include "netcpd/error.hpp"
#include "netcpd/parallel.hpp"
#include "netcpd/records.hpp"

namespace netcpd {

struct TauRef {
  double tau_ref = 0;   ///< raw_max * e_T
  int h = 0;            ///< window length
  double e_T = 0;       ///< slowly diverging inflation factor
  double raw_max = 0;   ///< max short-window signal before inflation
};

inline int tau_ref_window(int T) { return static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(T)))); }

inline double tau_ref_inflation(int T) { return std::log(std::log(static_cast<double>(T))) / 2.0; }

inline TauRef tau_ref(const CusumEngine& engine, Norm norm = Norm::Operator, unsigned threads = 1) {
  const int T = engine.T();
  if (T < 4) throw RangeError("tau_ref: T must be >= 4");
  TauRef out;
  out.h = tau_ref_window(T);
  out.e_T = tau_ref_inflation(T);
  if (T - out.h < 1) throw RangeError("tau_ref: T too small for any window of length " + std::to_string(out.h));
  std::vector<double> window_max(static_cast<std::size_t>(T - out.h));
  parallel_for(window_max.size(), threads, [&](std::size_t k) {
    const int j = static_cast<int>(k) + 1;
    window_max[k] = engine.interval_signal(j, j + out.h, norm);
  });
  out.raw_max = *std::max_element(window_max.begin(), window_max.end());
  out.tau_ref = out.raw_max * out.e_T;
  return out;
}

inline TauRef tau_ref(const AdjacencySequence& seq, Norm norm = Norm::Operator, unsigned threads = 1) {
  return tau_ref(CusumEngine(seq), norm, threads);
}

/// Density-peaks clustering of scalar signals into two clusters.
struct DensityPeaks {
  double bandwidth = 0;
  std::vector<double> rho;             ///< Gaussian KDE at each point
  std::vector<double> delta;           ///< distance to nearest denser point
  std::vector<double> gamma;           ///< rho * delta
  std::vector<int> nearest_denser;     ///< -1 for the densest point
  std::array<int, 2> centers{-1, -1};  ///< centers[0] is the low-signal cluster
  std::vector<int> labels;             ///< 0 = low cluster, 1 = high cluster
};

/// Silverman's rule of thumb, 1.06 * sd * M^(-1/5), sample standard deviation.
inline double silverman_bandwidth(const std::vector<double>& x) {
  const double m = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / m;
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (m - 1));
  return 1.06 * sd * std::pow(m, -0.2);
}

/// Density ordering: point a is denser than b iff rho_a > rho_b, with equal
/// densities ranked by index so that exactly one point has no denser
/// neighbour.
inline DensityPeaks density_peaks(const std::vector<double>& x, std::optional<double> bandwidth = std::nullopt) {
  const std::size_t M = x.size();
  if (M < 2) throw RangeError("density_peaks: need at least 2 signals");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    throw DegenerateDataError("density_peaks: all signals identical");
  }
  DensityPeaks dp;
  dp.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(x);
  if (!(dp.bandwidth > 0)) throw RangeError("density_peaks: bandwidth must be positive");

  const double h = dp.bandwidth;
  const double norm = 1.0 / (static_cast<double>(M) * h * std::sqrt(2.0 * std::numbers::pi));
  dp.rho.assign(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    double acc = 0;
    for (std::size_t i = 0; i < M; ++i) {
      const double u = (x[m] - x[i]) / h;
      acc += std::exp(-0.5 * u * u);
    }
    dp.rho[m] = acc * norm;
  }

  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dp.rho[a] > dp.rho[b]; });

  dp.delta.assign(M, 0.0);
  dp.nearest_denser.assign(M, -1);
  for (std::size_t rank = 0; rank < M; ++rank) {
    const std::size_t m = order[rank];
    if (rank == 0) {
      double far = 0;
      for (std::size_t j = 0; j < M; ++j) far = std::max(far, std::abs(x[j] - x[m]));
      dp.delta[m] = far;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (std::size_t r = 0; r < rank; ++r) {
      const std::size_t j = order[r];
      const double d = std::abs(x[j] - x[m]);
      if (d < best) {
        best = d;
        arg = static_cast<int>(j);
      }
    }
    dp.delta[m] = best;
    dp.nearest_denser[m] = arg;
  }

  dp.gamma.resize(M);
  for (std::size_t m = 0; m < M; ++m) dp.gamma[m] = dp.rho[m] * dp.delta[m];

  std::vector<std::size_t> by_gamma(M);
  std::iota(by_gamma.begin(), by_gamma.end(), std::size_t{0});
  std::stable_sort(by_gamma.begin(), by_gamma.end(), [&](std::size_t a, std::size_t b) { return dp.gamma[a] > dp.gamma[b]; });
  int c0 = static_cast<int>(by_gamma[0]);
  int c1 = static_cast<int>(by_gamma[1]);
  if (x[static_cast<std::size_t>(c0)] == x[static_cast<std::size_t>(c1)]) {
    throw DegenerateDataError("density_peaks: cluster centers coincide");
  }
  if (x[static_cast<std::size_t>(c0)] > x[static_cast<std::size_t>(c1)]) std::swap(c0, c1);
  dp.centers = {c0, c1};

  dp.labels.assign(M, -1);
  dp.labels[static_cast<std::size_t>(c0)] = 0;
  dp.labels[static_cast<std::size_t>(c1)] = 1;
  for (std::size_t rank = 0; rank < M; ++rank) {
    const std::size_t m = order[rank];
    if (dp.labels[m] >= 0) continue;
    if (dp.nearest_denser[m] < 0) {
      // densest point is not a center: attach it to the closer center
      const double d0 = std::abs(x[m] - x[static_cast<std::size_t>(c0)]);
      const double d1 = std::abs(x[m] - x[static_cast<std::size_t>(c1)]);
      dp.labels[m] = d1 < d0 ? 1 : 0;
    } else {
      dp.labels[m] = dp.labels[static_cast<std::size_t>(dp.nearest_denser[m])];
    }
  }
  return dp;
}

struct ThresholdDiagnostics {
  TauRef ref;
  std::optional<DensityPeaks> clusters;  ///< absent when clustering was degenerate
  std::vector<std::size_t> clustered;    ///< record index of each clustered point
  std::optional<double> boundary;        ///< midpoint of the between-cluster gap
  double tau_selected = 0;
  bool fallback_used = false;
};

/// Candidate range test for a clustering boundary.
inline bool in_candidate_range(double boundary, double tau_ref) {
  return boundary >= 0.1 * tau_ref && boundary <= 10.0 * tau_ref;
}

/// Boundary between the two clusters: midpoint of (max low, min high). Absent
/// when the clusters interleave.
inline std::optional<double> cluster_boundary(const std::vector<double>& x, const DensityPeaks& dp) {
  double max_low = -std::numeric_limits<double>::infinity();
  double min_high = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (dp.labels[m] == 0) max_low = std::max(max_low, x[m]);
    else min_high = std::min(min_high, x[m]);
  }
  if (!(max_low < min_high)) return std::nullopt;
  return 0.5 * (max_low + min_high);
}

inline ThresholdDiagnostics select_tau(const std::vector<SignalRecord>& records, const TauRef& ref) {
  if (records.empty()) throw RangeError("select_tau: no signal records");
  if (!(ref.tau_ref > 0)) throw DegenerateDataError("select_tau: tau_ref is zero (constant data?)");
  ThresholdDiagnostics diag;
  diag.ref = ref;
  // intervals without an interior split carry no signal and are left out
  std::vector<double> x;
  x.reserve(records.size());
  for (std::size_t m = 0; m < records.size(); ++m) {
    if (records[m].e - records[m].s <= 1) continue;
    x.push_back(records[m].signal);
    diag.clustered.push_back(m);
  }
  try {
    diag.clusters = density_peaks(x);
  } catch (const Error&) {
    diag.clusters.reset();
  }
  if (diag.clusters) diag.boundary = cluster_boundary(x, *diag.clusters);
  if (diag.boundary && in_candidate_range(*diag.boundary, ref.tau_ref)) {
    diag.tau_selected = *diag.boundary;
    diag.fallback_used = false;
  } else {
    diag.tau_selected = ref.tau_ref;
    diag.fallback_used = true;
  }
  return diag;
}

inline ThresholdDiagnostics select_tau(const std::vector<SignalRecord>& records, const CusumEngine& engine,
                                       Norm norm = Norm::Operator, unsigned threads = 1) {
  return select_tau(records, tau_ref(engine, norm, threads));
}

inline ThresholdDiagnostics select_tau(const std::vector<SignalRecord>& records, const AdjacencySequence& seq,
                                       Norm norm = Norm::Operator, unsigned threads = 1) {
  return select_tau(records, tau_ref(CusumEngine(seq), norm, threads));
}

}  // namespace netcpd

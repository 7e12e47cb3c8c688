#pragma once

// Markov chain Bernoulli network simulator.
//
// Each edge indicator A_ij(t) is a two-state Markov chain with kernel
//
//   P(0 -> 1) = m theta,   P(1 -> 1) = 1 - m + m theta,
//
// whose stationary law is Bernoulli(theta); m = 1 gives independent draws and
// 1 - m is the lag-one autocorrelation. Edges are mutually independent. At a
// change-point the chain is restarted from Bernoulli(theta_new), so E A(t)
// equals the segment mean exactly at every t.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netcpd/error.hpp"
#include "netcpd/linalg.hpp"
#include "netcpd/netseq.hpp"
#include "netcpd/parallel.hpp"
#include "netcpd/rng.hpp"
#include "netcpd/text_io.hpp"

namespace netcpd {

/// Row-stochastic 2x2 transition matrix, states ordered (0, 1).
struct Kernel {
  double p00, p01, p10, p11;
};

inline Kernel kernel(double theta, double m) {
  if (!(theta >= 0 && theta <= 1)) throw RangeError("kernel: theta must lie in [0,1]");
  if (!(m > 0 && m <= 1)) throw RangeError("kernel: m must lie in (0,1]");
  return {1 - m * theta, m * theta, m - m * theta, 1 - m + m * theta};
}

struct ScenarioConfig {
  int scenario_id = 0;                  ///< 1..3 for built-in scenarios, 0 for custom
  int n = 0;
  int T = 0;
  std::vector<int> change_points;       ///< 1 < eta_1 < ... < eta_K <= T; first index of a new segment
  std::vector<Eigen::MatrixXd> theta;   ///< K+1 segment means
  std::vector<double> mixing;           ///< m(t) for t = 1..T-1, stored at index t-1
  bool self_loops = true;
  bool carry_kernel_at_change = false;  ///< transition through the kernel at change-points instead of redrawing
  std::optional<std::uint64_t> mixing_seed;

  int K() const { return static_cast<int>(change_points.size()); }

  /// Segment index (0-based) of time t.
  int segment_of(int t) const {
    return static_cast<int>(std::upper_bound(change_points.begin(), change_points.end(), t) - change_points.begin());
  }

  void validate() const {
    if (n < 2 || T < 1) throw RangeError("ScenarioConfig: need n >= 2 and T >= 1");
    for (std::size_t k = 0; k < change_points.size(); ++k) {
      const int eta = change_points[k];
      if (eta <= 1 || eta > T) throw RangeError("ScenarioConfig: change-point outside (1, T]");
      if (k > 0 && eta <= change_points[k - 1]) throw RangeError("ScenarioConfig: change-points must increase");
    }
    if (theta.size() != change_points.size() + 1) throw RangeError("ScenarioConfig: need K+1 segment means");
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const auto& th = theta[k];
      if (th.rows() != n || th.cols() != n) throw RangeError("ScenarioConfig: theta has wrong size");
      (void)SymMatrix::from_dense(th);
      if (th.minCoeff() < 0 || th.maxCoeff() > 1) throw RangeError("ScenarioConfig: theta entries must lie in [0,1]");
      if (k > 0 && th == theta[k - 1]) throw RangeError("ScenarioConfig: adjacent segments have equal means");
    }
    if (mixing.size() != static_cast<std::size_t>(std::max(T - 1, 0))) throw RangeError("ScenarioConfig: need T-1 mixing values");
    for (double m : mixing)
      if (!(m > 0 && m <= 1)) throw RangeError("ScenarioConfig: mixing values must lie in (0,1]");
  }
};

struct ScenarioDiagnostics {
  std::optional<double> kappa;   ///< min operator-norm jump; absent when K = 0
  std::optional<double> kappa2;  ///< min Frobenius-norm jump; absent when K = 0
  double xi = 0;                 ///< sup |P(1|1) - P(1|0)| = 1 - min m(t)
  int delta = 0;                 ///< minimal spacing including both boundaries
};

/// Minimal spacing min(eta_1 - 1, eta_{k+1} - eta_k, T + 1 - eta_K); T when K = 0.
inline int minimal_spacing(const std::vector<int>& eta, int T) {
  if (eta.empty()) return T;
  int d = std::min(eta.front() - 1, T + 1 - eta.back());
  for (std::size_t k = 1; k < eta.size(); ++k) d = std::min(d, eta[k] - eta[k - 1]);
  return d;
}

inline ScenarioDiagnostics diagnostics(const ScenarioConfig& cfg) {
  ScenarioDiagnostics d;
  for (std::size_t k = 1; k < cfg.theta.size(); ++k) {
    const SymMatrix jump = SymMatrix::from_dense(cfg.theta[k] - cfg.theta[k - 1]);
    const double op = operator_norm(jump);
    const double fr = frobenius_norm(jump);
    d.kappa = d.kappa ? std::min(*d.kappa, op) : op;
    d.kappa2 = d.kappa2 ? std::min(*d.kappa2, fr) : fr;
  }
  if (!cfg.mixing.empty()) d.xi = 1.0 - *std::min_element(cfg.mixing.begin(), cfg.mixing.end());
  d.delta = minimal_spacing(cfg.change_points, cfg.T);
  return d;
}

struct GroundTruth {
  int scenario_id = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int T = 0;
  std::vector<int> change_points;
  ScenarioDiagnostics diag;
  std::optional<std::uint64_t> mixing_seed;
};

struct Simulation {
  AdjacencySequence seq;
  GroundTruth truth;
};

/// Draws one sequence. Pair (i, j), i <= j, uses the substream
/// derive_seed(seed, i * n + j), so output does not depend on `threads`.
inline Simulation simulate(const ScenarioConfig& cfg, std::uint64_t seed, unsigned threads = 1) {
  cfg.validate();
  const int n = cfg.n;
  const int T = cfg.T;
  std::vector<int> seg(static_cast<std::size_t>(T) + 1);
  std::vector<char> is_change(static_cast<std::size_t>(T) + 1, 0);
  for (int t = 1; t <= T; ++t) seg[static_cast<std::size_t>(t)] = cfg.segment_of(t);
  for (int eta : cfg.change_points) is_change[static_cast<std::size_t>(eta)] = 1;

  Simulation out{AdjacencySequence(T, n, cfg.self_loops), {}};
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
    const int i = static_cast<int>(row);
    for (int j = cfg.self_loops ? i : i + 1; j < n; ++j) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i) * n + j));
      bool x = rng.bernoulli(cfg.theta[0](i, j));
      if (x) out.seq.set_edge(1, i, j);
      for (int t = 2; t <= T; ++t) {
        const double th = cfg.theta[static_cast<std::size_t>(seg[static_cast<std::size_t>(t)])](i, j);
        if (is_change[static_cast<std::size_t>(t)] && !cfg.carry_kernel_at_change) {
          x = rng.bernoulli(th);
        } else {
          const double m = cfg.mixing[static_cast<std::size_t>(t) - 2];
          x = rng.bernoulli(x ? 1 - m + m * th : m * th);
        }
        if (x) out.seq.set_edge(t, i, j);
      }
    }
  });

  out.truth.scenario_id = cfg.scenario_id;
  out.truth.seed = seed;
  out.truth.n = n;
  out.truth.T = T;
  out.truth.change_points = cfg.change_points;
  out.truth.diag = diagnostics(cfg);
  out.truth.mixing_seed = cfg.mixing_seed;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in scenarios.

struct ScenarioOptions {
  std::optional<int> K;       ///< scenarios 2-3: number of change-points
  std::optional<double> rho;  ///< scenarios 2-3: sparsity factor
  bool self_loops = true;
  bool carry_kernel_at_change = false;
};

/// Default K for scenarios 2-3 at the simulated (T, K) pairs.
inline std::optional<int> default_change_count(int T) {
  switch (T) {
    case 160: return 3;
    case 250: return 4;
    case 360: return 5;
    default: return std::nullopt;
  }
}

/// Default sparsity factor rho for scenarios 2-3.
inline std::optional<double> default_rho(int n) {
  if (n == 50) return 1.0 / 3.0;
  if (n == 150) return 1.0 / 8.0;
  return std::nullopt;
}

/// Community sizes floor(n/3), floor(n/3), n - 2 floor(n/3).
inline std::array<int, 3> community_sizes(int n) { return {n / 3, n / 3, n - 2 * (n / 3)}; }

namespace detail {

inline Eigen::MatrixXd block_mean(int n, double rho, const Eigen::Matrix3d& q) {
  const auto sizes = community_sizes(n);
  std::vector<int> block(static_cast<std::size_t>(n));
  int idx = 0;
  for (int b = 0; b < 3; ++b)
    for (int c = 0; c < sizes[static_cast<std::size_t>(b)]; ++c) block[static_cast<std::size_t>(idx++)] = b;
  Eigen::MatrixXd th(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) th(i, j) = rho * q(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]);
  return th;
}

inline double sinusoid_f(int u, int n, bool middle_segment) {
  if (middle_segment && u <= 20) return std::sin((21.0 - u) / n);
  return std::sin(static_cast<double>(u) / n);
}

inline Eigen::MatrixXd sinusoid_mean(int n, bool middle_segment) {
  Eigen::MatrixXd th(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      th(i - 1, j - 1) = 0.6 * std::sin(sinusoid_f(i, n, middle_segment) + sinusoid_f(j, n, middle_segment));
  return th;
}

}  // namespace detail

inline Eigen::Matrix3d scenario_q1() {
  Eigen::Matrix3d q;
  q << 0.4, 1.0, 0.4,
       1.0, 0.4, 0.4,
       0.4, 0.4, 0.4;
  return q;
}

inline Eigen::Matrix3d scenario_q2() {
  Eigen::Matrix3d q;
  q << 0.4, 0.4, 1.0,
       0.4, 0.4, 0.4,
       1.0, 0.4, 0.4;
  return q;
}

/// Builds scenario 1 (sinusoidal means, m(t) ~ U(0.3, 0.6) i.i.d., change-points
/// at Delta and 3 Delta with Delta = T/4), scenario 2 (three communities,
/// alternating Q1/Q2, m(t) = 0.1 + 0.8 t(T-t)/T^2) or scenario 3 (as 2 with
/// m(t) = 0.2). Scenarios 2-3 place eta_k = k Delta + 1, Delta = floor(T/(K+1)).
inline ScenarioConfig scenario(int id, int n, int T, std::uint64_t seed, const ScenarioOptions& opt = {}) {
  ScenarioConfig cfg;
  cfg.scenario_id = id;
  cfg.n = n;
  cfg.T = T;
  cfg.self_loops = opt.self_loops;
  cfg.carry_kernel_at_change = opt.carry_kernel_at_change;
  if (n < 2 || T < 2) throw RangeError("scenario: need n >= 2 and T >= 2");

  if (id == 1) {
    const int delta = T / 4;
    if (delta < 2) throw RangeError("scenario 1: T must be >= 8");
    cfg.change_points = {delta, 3 * delta};
    const Eigen::MatrixXd outer = detail::sinusoid_mean(n, false);
    cfg.theta = {outer, detail::sinusoid_mean(n, true), outer};
    const std::uint64_t ms = derive_seed(seed, 0x6D6978696E67ULL);  // "mixing"
    cfg.mixing_seed = ms;
    Rng rng(ms);
    cfg.mixing.resize(static_cast<std::size_t>(T) - 1);
    for (auto& m : cfg.mixing) m = rng.uniform(0.3, 0.6);
  } else if (id == 2 || id == 3) {
    if (n < 3) throw RangeError("scenario " + std::to_string(id) + ": n must be >= 3 for three communities");
    const auto K = opt.K ? opt.K : default_change_count(T);
    if (!K) throw RangeError("scenario " + std::to_string(id) + ": no default K for T=" + std::to_string(T) + "; pass K");
    if (*K < 0) throw RangeError("scenario: K must be >= 0");
    const auto rho = opt.rho ? opt.rho : default_rho(n);
    if (!rho) throw RangeError("scenario " + std::to_string(id) + ": no default rho for n=" + std::to_string(n) + "; pass rho");
    if (!(*rho > 0 && *rho <= 1)) throw RangeError("scenario: rho must lie in (0,1]");
    const int delta = T / (*K + 1);
    if (*K > 0 && delta < 2) throw RangeError("scenario: T too small for K change-points");
    for (int k = 1; k <= *K; ++k) cfg.change_points.push_back(k * delta + 1);
    const Eigen::MatrixXd th1 = detail::block_mean(n, *rho, scenario_q1());
    const Eigen::MatrixXd th2 = detail::block_mean(n, *rho, scenario_q2());
    for (int k = 0; k <= *K; ++k) cfg.theta.push_back(k % 2 == 0 ? th1 : th2);
    cfg.mixing.resize(static_cast<std::size_t>(T) - 1);
    for (int t = 1; t <= T - 1; ++t) {
      const double tt = t;
      cfg.mixing[static_cast<std::size_t>(t) - 1] =
          id == 2 ? 0.1 + 0.8 * tt * (T - tt) / (static_cast<double>(T) * T) : 0.2;
    }
  } else {
    throw RangeError("scenario: id must be 1, 2 or 3");
  }
  if (!cfg.self_loops) {
    for (auto& th : cfg.theta) th.diagonal().setZero();
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Ground-truth sidecar: "key,value" CSV.

inline std::string format_change_points(const std::vector<int>& eta) {
  std::string out;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(eta[k]);
  }
  return out;
}

inline std::string to_ground_truth_csv(const GroundTruth& g) {
  std::string out = "key,value\n";
  out += "scenario," + std::to_string(g.scenario_id) + "\n";
  out += "seed," + std::to_string(g.seed) + "\n";
  out += "n," + std::to_string(g.n) + "\n";
  out += "T," + std::to_string(g.T) + "\n";
  out += "K," + std::to_string(g.change_points.size()) + "\n";
  out += "change_points," + format_change_points(g.change_points) + "\n";
  out += "kappa," + (g.diag.kappa ? text::fmt(*g.diag.kappa) : std::string("NA")) + "\n";
  out += "kappa2," + (g.diag.kappa2 ? text::fmt(*g.diag.kappa2) : std::string("NA")) + "\n";
  out += "xi," + text::fmt(g.diag.xi) + "\n";
  out += "delta," + std::to_string(g.diag.delta) + "\n";
  if (g.mixing_seed) out += "mixing_seed," + std::to_string(*g.mixing_seed) + "\n";
  return out;
}

inline void write_ground_truth(const GroundTruth& g, const std::string& path) {
  text::write_file(path, to_ground_truth_csv(g));
}

/// Parses "a;b;c" (possibly empty) into integers.
inline std::vector<int> parse_change_point_list(std::string_view field, std::size_t line_no) {
  std::vector<int> out;
  if (field.empty()) return out;
  for (auto part : text::split(field, ';')) {
    std::int64_t v;
    if (!text::parse_int(part, v)) throw FormatError("non-integer change-point '" + std::string(part) + "'", line_no);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline std::map<std::string, std::string> parse_key_value_csv(std::string_view data) {
  const auto rows = text::lines(data);
  if (rows.empty() || rows[0] != "key,value") throw FormatError("expected header \"key,value\"", 1);
  std::map<std::string, std::string> kv;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto comma = rows[r].find(',');
    if (comma == std::string_view::npos) throw FormatError("expected key,value", r + 1);
    kv[std::string(rows[r].substr(0, comma))] = std::string(rows[r].substr(comma + 1));
  }
  return kv;
}

}  // namespace netcpd

#pragma once

// CUSUM matrix statistics over a network sequence.
//
// For a triple s < t < e with (s, e] inside (0, T]:
//
//   C(s,t,e) = sqrt((e-t)/((e-s)(t-s))) * sum_{r=s+1..t} A(r)
//            - sqrt((t-s)/((e-s)(e-t))) * sum_{r=t+1..e} A(r)
//
// Time prefix sums are built once, so one statistic costs O(n^2) and one
// interval signal costs O((e-s) n^2) plus one eigensolve per split point.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netcpd/error.hpp"
#include "netcpd/linalg.hpp"
#include "netcpd/netseq.hpp"

namespace netcpd {

enum class Norm { Operator, Frobenius };

inline const char* to_string(Norm norm) { return norm == Norm::Operator ? "operator" : "frobenius"; }

/// Which interleaved grid of a subsampled sequence to use. With grid step g,
/// the even grid is s+1+2g*i and the odd grid is s+1+g*(2i+1), i = 0, 1, ...
enum class Parity { Even, Odd };

/// Floor division for possibly negative numerators (denominator > 0).
constexpr std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

/// Split position and extent of a subsampled CUSUM on one grid.
struct GridSplit {
  int first = 0;   ///< time of grid point 0
  int step = 0;    ///< spacing of the grid (2g)
  int last = 0;    ///< index of the last grid point inside (s, e]
  int split = 0;   ///< index of the last grid point in the left block
  bool degenerate() const { return split < 0 || split >= last; }
};

/// Grid geometry for the subsampled CUSUM at candidate t, in exact integer
/// arithmetic. Even grid: last = floor((e-s-1)/2g), split = floor((t-s-1)/2g).
/// Odd grid: last = floor((e-s-1)/2g - 1/2), split = floor((t-s-1)/2g - 1/2).
inline GridSplit grid_split(int s, int e, int t, int g, Parity parity) {
  if (g < 1) throw RangeError("grid step must be >= 1");
  GridSplit gs;
  gs.step = 2 * g;
  if (parity == Parity::Even) {
    gs.first = s + 1;
    gs.last = static_cast<int>(floor_div(e - s - 1, 2 * g));
    gs.split = static_cast<int>(floor_div(t - s - 1, 2 * g));
  } else {
    gs.first = s + 1 + g;
    gs.last = static_cast<int>(floor_div(e - s - 1 - g, 2 * g));
    gs.split = static_cast<int>(floor_div(t - s - 1 - g, 2 * g));
  }
  return gs;
}

/// Prefix sums of a (binary or real) symmetric matrix sequence, with the CUSUM
/// family of statistics on top.
class CusumEngine {
 public:
  explicit CusumEngine(const AdjacencySequence& seq) : T_(seq.T()), n_(seq.n()) {
    prefix_.reserve(static_cast<std::size_t>(T_) + 1);
    prefix_.push_back(Eigen::MatrixXd::Zero(n_, n_));
    for (int t = 1; t <= T_; ++t) prefix_.push_back(prefix_.back() + seq.matrix(t));
  }

  /// Real-valued path; every matrix must be n x n and exactly symmetric.
  explicit CusumEngine(const std::vector<Eigen::MatrixXd>& seq) {
    if (seq.empty()) throw RangeError("CusumEngine: empty sequence");
    T_ = static_cast<int>(seq.size());
    n_ = static_cast<int>(seq.front().rows());
    prefix_.reserve(seq.size() + 1);
    prefix_.push_back(Eigen::MatrixXd::Zero(n_, n_));
    for (const auto& m : seq) {
      (void)SymMatrix::from_dense(m);
      if (m.rows() != n_) throw RangeError("CusumEngine: inconsistent matrix sizes");
      prefix_.push_back(prefix_.back() + m);
    }
  }

  int T() const noexcept { return T_; }
  int n() const noexcept { return n_; }

  /// sum_{r=1..t} A(r), t in [0, T].
  const Eigen::MatrixXd& prefix(int t) const { return prefix_.at(static_cast<std::size_t>(t)); }

  /// Writes C(s,t,e) into `out` (full matrix, exactly symmetric).
  void cusum_into(int s, int t, int e, Eigen::MatrixXd& out) const {
    check_triple(s, t, e);
    const double len = e - s;
    const double a = std::sqrt((e - t) / (len * (t - s)));
    const double b = std::sqrt((t - s) / (len * (e - t)));
    const auto& ps = prefix_[static_cast<std::size_t>(s)];
    const auto& pt = prefix_[static_cast<std::size_t>(t)];
    const auto& pe = prefix_[static_cast<std::size_t>(e)];
    out.noalias() = a * (pt - ps) - b * (pe - pt);
  }

  SymMatrix cusum(int s, int t, int e) const {
    Eigen::MatrixXd out(n_, n_);
    cusum_into(s, t, e, out);
    return SymMatrix::from_lower(out);
  }

  /// Norms of C(s,t,e) for t = s+1 .. e-1 (empty when e - s <= 1).
  std::vector<double> signal_profile(int s, int e, Norm norm) const {
    check_interval(s, e);
    std::vector<double> out;
    if (e - s <= 1) return out;
    out.reserve(static_cast<std::size_t>(e - s - 1));
    Eigen::MatrixXd work(n_, n_);
    OperatorNormWorkspace op;
    for (int t = s + 1; t < e; ++t) {
      cusum_into(s, t, e, work);
      out.push_back(norm == Norm::Operator ? op(work) : work.norm());
    }
    return out;
  }

  /// max_{s<t<e} ||C(s,t,e)||, or 0 when the interval has no interior point.
  double interval_signal(int s, int e, Norm norm) const {
    double best = 0;
    for (double v : signal_profile(s, e, norm)) best = std::max(best, v);
    return best;
  }

  /// CUSUM over one interleaved grid of (s, e] split at candidate t: the
  /// standard CUSUM of the subsequence A(first + step*i), i = 0..last, whose
  /// left block is i = 0..split. Throws DegenerateDataError when either block
  /// is empty.
  SymMatrix subsampled_cusum(int s, int e, int t, int g, Parity parity) const {
    check_interval(s, e);
    const GridSplit gs = grid_split(s, e, t, g, parity);
    if (gs.last < 1) throw DegenerateDataError("subsampling grid has fewer than 2 points in (" + std::to_string(s) + "," + std::to_string(e) + "]");
    if (gs.degenerate()) throw DegenerateDataError("empty block in subsampled CUSUM at t=" + std::to_string(t));
    Eigen::MatrixXd left = Eigen::MatrixXd::Zero(n_, n_);
    Eigen::MatrixXd right = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i <= gs.last; ++i) {
      const int time = gs.first + gs.step * i;
      const Eigen::MatrixXd a = prefix_[static_cast<std::size_t>(time)] - prefix_[static_cast<std::size_t>(time) - 1];
      (i <= gs.split ? left : right) += a;
    }
    const double count = gs.last + 1;
    const double n_left = gs.split + 1;
    const double n_right = count - n_left;
    Eigen::MatrixXd out = std::sqrt(n_right / (count * n_left)) * left - std::sqrt(n_left / (count * n_right)) * right;
    return SymMatrix::from_lower(out);
  }

 private:
  void check_interval(int s, int e) const {
    if (s < 0 || e > T_ || s > e) {
      throw RangeError("interval (" + std::to_string(s) + "," + std::to_string(e) + "] outside (0," + std::to_string(T_) + "]");
    }
  }
  void check_triple(int s, int t, int e) const {
    if (s < 0 || e > T_ || !(s < t && t < e)) {
      throw RangeError("invalid CUSUM triple (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ", e=" + std::to_string(e) + ")");
    }
  }

  int T_ = 0;
  int n_ = 0;
  std::vector<Eigen::MatrixXd> prefix_;
};

/// Convenience wrappers over a one-shot engine.
inline SymMatrix cusum(const AdjacencySequence& seq, int s, int t, int e) {
  return CusumEngine(seq).cusum(s, t, e);
}

inline double interval_signal(const AdjacencySequence& seq, int s, int e, Norm norm) {
  return CusumEngine(seq).interval_signal(s, e, norm);
}

inline SymMatrix subsampled_cusum(const AdjacencySequence& seq, int s, int e, int t, int g, Parity parity) {
  return CusumEngine(seq).subsampled_cusum(s, e, t, g, parity);
}

}  // namespace netcpd

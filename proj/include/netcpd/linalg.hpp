#pragma once

// Symmetric-matrix primitives: norms, inner product, eigendecomposition with a
// deterministic ordering, and universal singular value thresholding (USVT).
//
// Dense eigensolves are delegated to Eigen's SelfAdjointEigenSolver
// (Householder tridiagonalization + implicit symmetric QR).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "netcpd/error.hpp"

namespace netcpd {

/// Real symmetric n x n matrix, n >= 1. Symmetry is exact: every constructor
/// either validates it bit-for-bit or builds the upper triangle by mirroring.
class SymMatrix {
 public:
  explicit SymMatrix(int n) : m_(Eigen::MatrixXd::Zero(check_dim(n), n)) {}

  static SymMatrix identity(int n) {
    SymMatrix s(n);
    s.m_.setIdentity();
    return s;
  }

  /// Rejects matrices that are not exactly symmetric.
  static SymMatrix from_dense(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw RangeError("SymMatrix: matrix must be square and non-empty");
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = j + 1; i < m.rows(); ++i)
        if (m(i, j) != m(j, i)) throw RangeError("SymMatrix: matrix is not exactly symmetric");
    SymMatrix s(static_cast<int>(m.rows()));
    s.m_ = m;
    return s;
  }

  /// Uses the lower triangle of `m` and mirrors it.
  static SymMatrix from_lower(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw RangeError("SymMatrix: matrix must be square and non-empty");
    SymMatrix s(static_cast<int>(m.rows()));
    s.m_ = m;
    s.mirror_lower();
    return s;
  }

  int n() const noexcept { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& dense() const noexcept { return m_; }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    check_same(a, b);
    SymMatrix r(a.n());
    r.m_ = a.m_ + b.m_;
    return r;
  }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    check_same(a, b);
    SymMatrix r(a.n());
    r.m_ = a.m_ - b.m_;
    return r;
  }
  friend SymMatrix operator*(double c, const SymMatrix& a) {
    SymMatrix r(a.n());
    r.m_ = c * a.m_;
    return r;
  }
  SymMatrix operator-() const { return -1.0 * *this; }

  static void check_same(const SymMatrix& a, const SymMatrix& b) {
    if (a.n() != b.n()) throw RangeError("SymMatrix: dimension mismatch");
  }

 private:
  static int check_dim(int n) {
    if (n < 1) throw RangeError("SymMatrix: dimension must be >= 1");
    return n;
  }
  void mirror_lower() {
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      for (Eigen::Index i = j + 1; i < m_.rows(); ++i) m_(j, i) = m_(i, j);
  }

  Eigen::MatrixXd m_;
};

/// Entrywise clip level for USVT: either a finite positive bound or unbounded.
class ClipBound {
 public:
  static ClipBound unbounded() { return ClipBound(); }
  static ClipBound at(double level) {
    if (!(level > 0)) throw RangeError("ClipBound: level must be positive");
    return ClipBound(level);
  }

  bool is_unbounded() const noexcept { return !bounded_; }
  double level() const noexcept { return bounded_ ? level_ : std::numeric_limits<double>::infinity(); }

 private:
  ClipBound() = default;
  explicit ClipBound(double level) : bounded_(true), level_(level) {}
  bool bounded_ = false;
  double level_ = 0;
};

namespace detail {

inline double max_abs_eigenvalue(const Eigen::VectorXd& ascending) {
  return std::max(std::abs(ascending(0)), std::abs(ascending(ascending.size() - 1)));
}

}  // namespace detail

/// Reusable eigenvalue workspace for repeated operator-norm evaluations of
/// same-sized matrices. Only the lower triangle of the argument is read.
class OperatorNormWorkspace {
 public:
  double operator()(const Eigen::MatrixXd& lower) {
    solver_.compute(lower, Eigen::EigenvaluesOnly);
    if (solver_.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
    return detail::max_abs_eigenvalue(solver_.eigenvalues());
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

/// Largest absolute eigenvalue.
inline double operator_norm(const SymMatrix& m) {
  OperatorNormWorkspace ws;
  return ws(m.dense());
}

inline double frobenius_norm(const SymMatrix& m) { return m.dense().norm(); }

inline double inner_product(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix::check_same(a, b);
  return a.dense().cwiseProduct(b.dense()).sum();
}

struct SymEigen {
  Eigen::VectorXd values;   ///< sorted by |lambda| descending, ties by lambda descending
  Eigen::MatrixXd vectors;  ///< orthonormal columns matching `values`
};

inline SymEigen sym_eigen(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  const Eigen::Index n = m.n();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double fa = std::abs(ev(a)), fb = std::abs(ev(b));
    if (fa != fb) return fa > fb;
    return ev(a) > ev(b);
  });
  SymEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = ev(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

/// Universal singular value thresholding of a symmetric matrix: keep the
/// eigenpairs with |lambda| >= tau2, rebuild, then clip every entry to
/// [-tau4, tau4]. tau2 = 0 keeps the full spectrum.
inline SymMatrix usvt(const SymMatrix& a, double tau2, ClipBound tau4) {
  if (!(tau2 >= 0) || !std::isfinite(tau2)) throw RangeError("usvt: tau2 must be finite and >= 0");
  const SymEigen eig = sym_eigen(a);
  Eigen::Index keep = 0;
  while (keep < eig.values.size() && std::abs(eig.values(keep)) >= tau2) ++keep;

  const int n = a.n();
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(n, n);
  if (keep > 0) {
    const auto v = eig.vectors.leftCols(keep);
    rebuilt.noalias() = v * eig.values.head(keep).asDiagonal() * v.transpose();
  }
  if (!tau4.is_unbounded()) {
    const double c = tau4.level();
    rebuilt = rebuilt.cwiseMax(-c).cwiseMin(c);
  }
  return SymMatrix::from_lower(rebuilt);
}

}  // namespace netcpd

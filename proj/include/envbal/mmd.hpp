#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "envbal/types.hpp"

namespace envbal {

/// Kernel for Gram matrices and discrepancy estimates. An rbf bandwidth of 0
/// means "unset"; mmd_sq and resolve_kernel fill it with the median pairwise
/// distance of the pooled input (falling back to 1 when that median is 0).
struct Kernel {
  enum class Kind { linear, rbf };
  Kind kind = Kind::linear;
  double bandwidth = 0.0;

  static Kernel linear() { return {Kind::linear, 0.0}; }
  static Kernel rbf(double bandwidth = 0.0) { return {Kind::rbf, bandwidth}; }
};

template <class Scalar>
struct MmdEstimate {
  Scalar mmd_sq = 0;  // clamped at 0
  Scalar e_xx = 0;    // mean of the within-X Gram matrix
  Scalar e_vv = 0;    // mean of the within-V Gram matrix
  Scalar e_xv = 0;    // mean of the cross Gram matrix
};

/// Entry (i, j) holds the squared distance between row i of `a` and row j of
/// `b`. Computed pairwise so coincident rows give an exact zero.
template <class DerivedA, class DerivedB>
DenseMatrix<typename DerivedA::Scalar> squared_distances(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("squared_distances: dimension mismatch");
  }
  DenseMatrix<typename DerivedA::Scalar> d2(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      d2(i, j) = (a.row(i) - b.row(j)).squaredNorm();
    }
  }
  return d2;
}

/// Median pairwise distance of the rows of the pooled set [a; b].
template <class DerivedA, class DerivedB>
typename DerivedA::Scalar median_pairwise_distance(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  DenseMatrix<Scalar> pooled(a.rows() + b.rows(), a.cols());
  pooled << a.derived(), b.derived();

  std::vector<Scalar> dists;
  dists.reserve(static_cast<std::size_t>(pooled.rows() * (pooled.rows() - 1) / 2));
  for (Index i = 0; i < pooled.rows(); ++i) {
    for (Index j = i + 1; j < pooled.rows(); ++j) {
      dists.push_back((pooled.row(i) - pooled.row(j)).norm());
    }
  }
  if (dists.empty()) return Scalar(0);
  std::sort(dists.begin(), dists.end());
  const std::size_t mid = dists.size() / 2;
  if (dists.size() % 2 == 1) return dists[mid];
  return (dists[mid - 1] + dists[mid]) / Scalar(2);
}

/// Returns `k` with the rbf bandwidth resolved against the pooled (x, v) set.
template <class DerivedX, class DerivedV>
Kernel resolve_kernel(const Kernel& k, const Eigen::MatrixBase<DerivedX>& x,
                      const Eigen::MatrixBase<DerivedV>& v) {
  Kernel out = k;
  if (out.kind == Kernel::Kind::rbf && out.bandwidth <= 0.0) {
    const double med = static_cast<double>(median_pairwise_distance(x, v));
    out.bandwidth = med > 0.0 ? med : 1.0;
  }
  return out;
}

/// Gram matrix: entry (i, j) = k(a_i, b_j).
template <class DerivedA, class DerivedB>
DenseMatrix<typename DerivedA::Scalar> gram(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b,
                                            const Kernel& k) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("gram: dimension mismatch");
  }
  if (k.kind == Kernel::Kind::linear) {
    return a.derived() * b.derived().transpose();
  }
  if (k.bandwidth <= 0.0) {
    throw std::invalid_argument("gram: rbf kernel needs a positive bandwidth");
  }
  const Scalar denom = Scalar(2) * Scalar(k.bandwidth) * Scalar(k.bandwidth);
  DenseMatrix<Scalar> d2 = squared_distances(a, b);
  return (-d2.array() / denom).exp().matrix();
}

/// Arithmetic mean of all entries.
template <class Derived>
typename Derived::Scalar mean_moment(const Eigen::MatrixBase<Derived>& s) {
  if (s.size() == 0) throw std::invalid_argument("mean_moment: empty matrix");
  return s.mean();
}

/// Biased (V-statistic) squared maximum mean discrepancy between the row sets
/// x and v: E(S_xx) + E(S_vv) - 2 E(S_xv), clamped at 0. The reported moments
/// are left unclamped.
template <class DerivedX, class DerivedV>
MmdEstimate<typename DerivedX::Scalar> mmd_sq(const Eigen::MatrixBase<DerivedX>& x,
                                              const Eigen::MatrixBase<DerivedV>& v,
                                              const Kernel& k) {
  using Scalar = typename DerivedX::Scalar;
  if (x.rows() == 0 || v.rows() == 0) {
    throw std::invalid_argument("mmd_sq: empty instance set");
  }
  if (x.cols() != v.cols()) {
    throw std::invalid_argument("mmd_sq: dimension mismatch");
  }
  const Kernel rk = resolve_kernel(k, x, v);

  MmdEstimate<Scalar> est;
  est.e_xx = mean_moment(gram(x, x, rk));
  est.e_vv = mean_moment(gram(v, v, rk));
  est.e_xv = mean_moment(gram(x, v, rk));
  est.mmd_sq = std::max(Scalar(0), est.e_xx + est.e_vv - Scalar(2) * est.e_xv);
  return est;
}

}  // namespace envbal

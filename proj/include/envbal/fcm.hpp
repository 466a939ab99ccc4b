#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "envbal/mmd.hpp"
#include "envbal/types.hpp"

namespace envbal {

struct FcmConfig {
  double m = 2.0;            // fuzzification coefficient, > 1
  double epsilon = 1e-5;     // objective-change convergence threshold
  int max_iterations = 100;  // cap on update sweeps
  std::uint64_t seed = 0;    // membership initialization
};

/// Outcome of one fuzzy c-means fit. `memberships` is c x n and
/// column-stochastic; `prototypes` is c x d and each prototype stays inside
/// the bounding box of the input rows.
struct FcmResult {
  Matrix prototypes;
  Matrix memberships;
  std::vector<double> objective_trace;
  int iterations_used = 0;
  bool converged = false;
};

/// Weighted within-cluster scatter: sum over clusters i and points k of
/// u_ik^m ||x_k - v_i||^2.
template <class DerivedX, class DerivedU, class DerivedV>
double objective(const Eigen::MatrixBase<DerivedX>& x,
                 const Eigen::MatrixBase<DerivedU>& u,
                 const Eigen::MatrixBase<DerivedV>& v, double m) {
  if (u.rows() != v.rows() || u.cols() != x.rows() || v.cols() != x.cols()) {
    throw std::invalid_argument("objective: shape mismatch");
  }
  const Matrix d2 = squared_distances(v, x);
  return (u.derived().array().pow(m) * d2.array()).sum();
}

/// Membership update: u_ik = 1 / sum_j (d_ik / d_jk)^(2/(m-1)). A point that
/// coincides with one or more prototypes gets its membership split equally
/// among the coincident prototypes.
template <class DerivedX, class DerivedV>
Matrix update_memberships(const Eigen::MatrixBase<DerivedX>& x,
                          const Eigen::MatrixBase<DerivedV>& v, double m) {
  if (v.rows() < 1) throw std::invalid_argument("update_memberships: c < 1");
  if (x.cols() != v.cols()) {
    throw std::invalid_argument("update_memberships: dimension mismatch");
  }
  const Index c = v.rows();
  const Index n = x.rows();
  const double p = 1.0 / (m - 1.0);
  const Matrix d2 = squared_distances(v, x);

  Matrix u(c, n);
  for (Index k = 0; k < n; ++k) {
    Index coincident = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < c; ++i) {
      if (d2(i, k) == 0.0) ++coincident;
      dmin = std::min(dmin, d2(i, k));
    }
    if (coincident > 0) {
      for (Index i = 0; i < c; ++i) {
        u(i, k) = d2(i, k) == 0.0 ? 1.0 / static_cast<double>(coincident) : 0.0;
      }
      continue;
    }
    // Scaling by the smallest distance keeps every power in (0, 1].
    double total = 0.0;
    for (Index i = 0; i < c; ++i) {
      u(i, k) = std::pow(dmin / d2(i, k), p);
      total += u(i, k);
    }
    u.col(k) /= total;
  }
  return u;
}

/// Prototype update: v_i = sum_k u_ik^m x_k / sum_k u_ik^m.
template <class DerivedX, class DerivedU>
Matrix update_prototypes(const Eigen::MatrixBase<DerivedX>& x,
                         const Eigen::MatrixBase<DerivedU>& u, double m) {
  if (u.cols() != x.rows()) {
    throw std::invalid_argument("update_prototypes: shape mismatch");
  }
  const Matrix w = u.derived().array().pow(m).matrix();
  const Vector totals = w.rowwise().sum();
  if ((totals.array() <= 0.0).any()) {
    throw std::domain_error(
        "update_prototypes: a cluster has zero total weighted membership");
  }
  Matrix v = w * x.derived();
  v.array().colwise() /= totals.array();
  return v;
}

/// Alternating-update fit from a seeded random column-stochastic membership
/// matrix, stopping when the objective changes by less than epsilon or the
/// iteration cap is hit.
FcmResult fit(const Matrix& x, Index c, const FcmConfig& config);

/// Seeded random c x n column-stochastic matrix (the fit initializer).
Matrix random_memberships(Index c, Index n, std::uint64_t seed);

}  // namespace envbal

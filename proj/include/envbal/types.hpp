#pragma once

#include <Eigen/Dense>

namespace envbal {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using DenseRowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = DenseMatrix<double>;
using Vector = DenseVector<double>;
using RowVector = DenseRowVector<double>;
using Index = Eigen::Index;

}  // namespace envbal

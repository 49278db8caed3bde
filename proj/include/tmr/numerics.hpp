#pragma once

#include "tmr/errors.hpp"
#include "tmr/types.hpp"

#include <functional>

namespace tmr {

enum class Axis { Rows, Cols };

// Sum of row Euclidean norms. Pass the transpose for the column-wise variant.
template <typename Derived>
Scalar l21_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.rowwise().norm().sum();
}

template <typename Derived>
Scalar frobenius_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();
}

// IRLS diagonal for an l2,1 penalty on the slices of e:
//   w_i = 1 / (2 * ||slice_i||_2 + tau)
// where slice_i runs over columns (Axis::Cols) or rows (Axis::Rows). tau > 0
// guards the zero-slice singularity, so every weight is finite and positive.
Vector reweight_diag(const Matrix& e, Axis axis, Scalar tau);

// Solves X * S = B for X, with S square and symmetric. The result satisfies
// ||X*S - B||_F <= 1e-9 * max(1, ||B||_F); otherwise SingularSystem is thrown.
Matrix solve_right(const Matrix& b, const Matrix& s);

// solve_right with one retry on SingularSystem after adding a ridge of
// 1e-10 * trace(S)/dim to the diagonal. Systems built from reconstruction
// weights with unit column sums are exactly singular along the ones vector,
// so this path is hit routinely.
Matrix solve_right_ridged(const Matrix& b, const Matrix& s);

// Central-difference gradient of a scalar function of a matrix, entry by
// entry: (f(M + h*E_ij) - f(M - h*E_ij)) / (2h). Exact for quadratics up to
// roundoff; used as the stationarity oracle in tests.
Matrix fd_gradient(const std::function<Scalar(const Matrix&)>& f, const Matrix& m,
                   Scalar h);

}  // namespace tmr

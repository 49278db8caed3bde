#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace tmr {

// Double precision throughout: the solver inverts N x N systems whose
// conditioning would amplify single-precision error.
using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

// Marker returned by label prediction for columns carrying no information
// (all-zero soft label vector).
inline constexpr Index kAbstain = -1;

}  // namespace tmr

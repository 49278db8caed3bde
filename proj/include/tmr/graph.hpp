#pragma once

#include "tmr/errors.hpp"
#include "tmr/types.hpp"

namespace tmr {

// Per-point K nearest neighbor indices. No self-index, exactly K entries per
// point, ties broken by smaller index.
using NeighborList = std::vector<IndexList>;

// K nearest distinct other points of every column of X (n x N, one sample
// per column) by Euclidean distance. Throws TooFewPoints when N <= K.
NeighborList knn(const Matrix& x, Index k);

// Sum-to-one coefficients minimizing ||d * w||^2 over the columns of the
// difference matrix d (point minus each neighbor), through the ridged local
// Gram system shared by lle_weights and the out-of-sample extension.
Vector solve_reconstruction_weights(const Matrix& diffs, Scalar reg);

// Locally linear reconstruction weights: for each sample j, coefficients over
// its neighbors summing to one and minimizing ||x_j - sum_i w_i x_{nbr_i}||^2.
// The K x K local Gram system gets a ridge of reg * trace(G)/K (reg alone when
// the trace vanishes, i.e. all neighbors coincide with x_j). Column j of the
// returned N x N matrix holds the coefficients reconstructing x_j; the
// diagonal is zero and columns sum to one. Coefficients may be negative.
Matrix lle_weights(const Matrix& x, const NeighborList& neighbors, Scalar reg = 1e-3);

// (W + W^T)/2 with the diagonal forced to zero.
Matrix symmetrize(const Matrix& w);

// Graph Laplacian of a square nonnegative weight matrix: D - W, or the
// normalized I - D^{-1/2} W D^{-1/2} with zero-degree rows mapped to identity
// rows.
Matrix laplacian(const Matrix& w, bool normalized);

}  // namespace tmr

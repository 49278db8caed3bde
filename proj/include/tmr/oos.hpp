#pragma once

#include "tmr/alptmr.hpp"
#include "tmr/types.hpp"

namespace tmr {

// Soft label for a point absent from training: the query is reconstructed
// from its K nearest labeled training points with the same sum-to-one local
// Gram weights as the training graph, and the recovered clean soft labels of
// those neighbors are combined with the reconstruction weights. x holds the
// full training data (one sample per column); neighbors are searched within
// labeled_idx only. Throws TooFewLabeled when fewer than K labeled points
// exist.
Vector extend(const RecoveredModel& model, const Matrix& x, const IndexList& labeled_idx,
              const Vector& x_new, Index k, Scalar reg = 1e-3);

// extend for every column of x_queries, then per-query argmax.
IndexList predict_new(const RecoveredModel& model, const Matrix& x,
                      const IndexList& labeled_idx, const Matrix& x_queries, Index k,
                      Scalar reg = 1e-3);

}  // namespace tmr

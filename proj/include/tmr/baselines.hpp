#pragma once

#include "tmr/errors.hpp"
#include "tmr/types.hpp"

namespace tmr {

// Closed-form solver of the transductive label propagation objective
//   min_F  tr(F L F^T) + tr((F - Y) U (F - Y)^T),
// whose unique minimizer is F = Y U (L + U)^{-1}. W must be symmetric and
// nonnegative; u_diag holds the per-sample fitness weights (diagonal of U).
// The solve is retried once with a ridge; SingularSystem signals a system
// that stays singular (e.g. an all-zero U).
Matrix general_lp(const Matrix& w, const Matrix& y, const Vector& u_diag,
                  bool normalized);

// Gaussian fields / harmonic solution: unnormalized Laplacian, u = 1e8 on
// labeled samples and 0 elsewhere, then labeled columns overwritten with Y
// exactly. W is symmetrized internally.
Matrix gfhf(const Matrix& w, const Matrix& y, const IndexList& labeled_idx);

// Local and global consistency: normalized Laplacian with uniform U = mu * I.
// W is symmetrized (diagonal zeroed) internally. Requires mu > 0.
Matrix llgc(const Matrix& w, const Matrix& y, Scalar mu);

// Per-column argmax of the soft labels, ties to the smallest class index.
// All-zero columns map to kAbstain.
IndexList predict_labels(const Matrix& f);

}  // namespace tmr

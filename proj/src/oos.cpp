#include "tmr/oos.hpp"

#include "tmr/baselines.hpp"
#include "tmr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace tmr {

Vector extend(const RecoveredModel& model, const Matrix& x, const IndexList& labeled_idx,
              const Vector& x_new, Index k, Scalar reg) {
  if (k < 1) {
    throw ValidationError("extend: K must be >= 1");
  }
  if (static_cast<Index>(labeled_idx.size()) < k) {
    throw TooFewLabeled("extend: " + std::to_string(labeled_idx.size()) +
                        " labeled points, need at least " + std::to_string(k));
  }
  if (x_new.size() != x.rows()) {
    throw DimensionMismatch("extend: query dimension mismatch");
  }

  // K nearest labeled points, ties by smaller training index.
  std::vector<std::pair<Scalar, Index>> order;
  order.reserve(labeled_idx.size());
  for (Index j : labeled_idx) {
    if (j < 0 || j >= x.cols()) {
      throw ValidationError("extend: labeled index out of range");
    }
    order.emplace_back((x.col(j) - x_new).squaredNorm(), j);
  }
  std::sort(order.begin(), order.end());

  Matrix diffs(x.rows(), k);
  for (Index i = 0; i < k; ++i) {
    diffs.col(i) = x_new - x.col(order[static_cast<std::size_t>(i)].second);
  }
  const Vector weights = solve_reconstruction_weights(diffs, reg);

  Vector f_new = Vector::Zero(model.f_clean.rows());
  for (Index i = 0; i < k; ++i) {
    f_new += weights[i] * model.f_clean.col(order[static_cast<std::size_t>(i)].second);
  }
  return f_new;
}

IndexList predict_new(const RecoveredModel& model, const Matrix& x,
                      const IndexList& labeled_idx, const Matrix& x_queries, Index k,
                      Scalar reg) {
  Matrix f(model.f_clean.rows(), x_queries.cols());
  for (Index j = 0; j < x_queries.cols(); ++j) {
    f.col(j) = extend(model, x, labeled_idx, x_queries.col(j), k, reg);
  }
  return predict_labels(f);
}

}  // namespace tmr

#include "tmr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace tmr {

namespace {

// Local Gram solve for reconstruction weights: G v = e with a retry on a
// trace-scaled ridge. Underdetermined neighborhoods (more neighbors than
// dimensions) are fine: the ridge picks one interpolating solution and the
// reconstruction residual is unaffected.
Vector solve_local_gram(Matrix gram) {
  const Index k = gram.rows();
  const Vector ones = Vector::Ones(k);
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() == Eigen::Success) {
      Vector v = ldlt.solve(ones);
      v += ldlt.solve(ones - gram * v);
      const Scalar sum = v.sum();
      if (v.allFinite() && sum != 0.0) {
        return v;
      }
    }
    Scalar ridge = 1e-10 * gram.trace() / static_cast<Scalar>(k);
    if (!(ridge > 0.0)) ridge = 1e-10;
    gram.diagonal().array() += ridge;
  }
  throw SingularSystem("lle weights: degenerate local Gram system");
}

}  // namespace

Vector solve_reconstruction_weights(const Matrix& diffs, Scalar reg) {
  const Index k = diffs.cols();
  Matrix gram = diffs.transpose() * diffs;
  const Scalar tr = gram.trace();
  // A 1e-12 floor keeps reg = 0 meaningful when the neighborhood has more
  // points than dimensions: the ridge limit is the constrained least-squares
  // minimizer even though the Gram is rank deficient.
  gram.diagonal().array() +=
      tr > 0.0 ? (reg + 1e-12) * tr / static_cast<Scalar>(k) : std::max(reg, 1e-12);
  Vector v = solve_local_gram(gram);
  v /= v.sum();
  return v;
}

NeighborList knn(const Matrix& x, Index k) {
  const Index n_points = x.cols();
  if (k < 1) {
    throw ValidationError("knn: K must be >= 1");
  }
  if (n_points <= k) {
    throw TooFewPoints("knn: need more than K = " + std::to_string(k) +
                       " points, got " + std::to_string(n_points));
  }

  // Squared pairwise distances via the Gram expansion.
  const Vector sq = x.colwise().squaredNorm();
  Matrix d2 = sq.replicate(1, n_points) + sq.transpose().replicate(n_points, 1) -
              2.0 * (x.transpose() * x);

  NeighborList neighbors(static_cast<std::size_t>(n_points));
  std::vector<std::pair<Scalar, Index>> order;
  order.reserve(static_cast<std::size_t>(n_points) - 1);
  for (Index j = 0; j < n_points; ++j) {
    order.clear();
    for (Index i = 0; i < n_points; ++i) {
      if (i == j) continue;
      order.emplace_back(std::max(d2(i, j), 0.0), i);
    }
    // Lexicographic (distance, index) ordering makes ties deterministic.
    std::partial_sort(order.begin(), order.begin() + k, order.end());
    IndexList& list = neighbors[static_cast<std::size_t>(j)];
    list.resize(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
      list[static_cast<std::size_t>(i)] = order[static_cast<std::size_t>(i)].second;
    }
  }
  return neighbors;
}

Matrix lle_weights(const Matrix& x, const NeighborList& neighbors, Scalar reg) {
  if (reg < 0.0) {
    throw ValidationError("lle_weights: reg must be >= 0");
  }
  const Index n_points = x.cols();
  if (static_cast<Index>(neighbors.size()) != n_points) {
    throw DimensionMismatch("lle_weights: neighbor list size mismatch");
  }

  Matrix w = Matrix::Zero(n_points, n_points);
  for (Index j = 0; j < n_points; ++j) {
    const IndexList& nbrs = neighbors[static_cast<std::size_t>(j)];
    const Index k = static_cast<Index>(nbrs.size());
    Matrix diffs(x.rows(), k);
    for (Index i = 0; i < k; ++i) {
      diffs.col(i) = x.col(j) - x.col(nbrs[static_cast<std::size_t>(i)]);
    }
    // Minimizing ||x_j - sum w_i x_i||^2 under sum(w) = 1 reduces to
    // G v = e followed by normalization.
    const Vector v = solve_reconstruction_weights(diffs, reg);
    for (Index i = 0; i < k; ++i) {
      w(nbrs[static_cast<std::size_t>(i)], j) = v[i];
    }
  }
  return w;
}

Matrix symmetrize(const Matrix& w) {
  if (w.rows() != w.cols()) {
    throw DimensionMismatch("symmetrize: W must be square");
  }
  Matrix s = 0.5 * (w + w.transpose());
  s.diagonal().setZero();
  return s;
}

Matrix laplacian(const Matrix& w, bool normalized) {
  if (w.rows() != w.cols()) {
    throw DimensionMismatch("laplacian: W must be square");
  }
  const Vector degree = w.rowwise().sum();
  if (!normalized) {
    Matrix l = -w;
    l.diagonal() += degree;
    return l;
  }
  Vector dinv_sqrt(degree.size());
  for (Index i = 0; i < degree.size(); ++i) {
    dinv_sqrt[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
  }
  // Zero-degree rows fall out as identity rows: their scaled block is zero.
  Matrix l = -(dinv_sqrt.asDiagonal() * w * dinv_sqrt.asDiagonal());
  l.diagonal().array() += 1.0;
  return l;
}

}  // namespace tmr

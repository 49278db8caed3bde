#include "tmr/baselines.hpp"

#include "tmr/graph.hpp"
#include "tmr/numerics.hpp"

namespace tmr {

namespace {
constexpr Scalar kClampWeight = 1e8;
}

Matrix general_lp(const Matrix& w, const Matrix& y, const Vector& u_diag,
                  bool normalized) {
  if (w.rows() != w.cols()) {
    throw DimensionMismatch("general_lp: W must be square");
  }
  if (y.cols() != w.rows() || u_diag.size() != w.rows()) {
    throw DimensionMismatch("general_lp: Y/U size mismatch with W");
  }
  if (u_diag.minCoeff() < 0.0) {
    throw ValidationError("general_lp: U must be nonnegative");
  }
  if (!(u_diag.maxCoeff() > 0.0)) {
    throw SingularSystem("general_lp: U has no positive entry");
  }

  Matrix system = laplacian(w, normalized);
  system += Matrix(u_diag.asDiagonal());
  const Matrix rhs = y * u_diag.asDiagonal();
  return solve_right_ridged(rhs, system);
}

Matrix gfhf(const Matrix& w, const Matrix& y, const IndexList& labeled_idx) {
  const Matrix ws = symmetrize(w);
  Vector u = Vector::Zero(ws.rows());
  for (Index j : labeled_idx) {
    if (j < 0 || j >= ws.rows()) {
      throw ValidationError("gfhf: labeled index out of range");
    }
    u[j] = kClampWeight;
  }
  Matrix f = general_lp(ws, y, u, /*normalized=*/false);
  // Exact clamping of the labeled columns.
  for (Index j : labeled_idx) {
    f.col(j) = y.col(j);
  }
  return f;
}

Matrix llgc(const Matrix& w, const Matrix& y, Scalar mu) {
  if (!(mu > 0.0)) {
    throw ValidationError("llgc: mu must be > 0");
  }
  const Matrix ws = symmetrize(w);
  const Vector u = Vector::Constant(ws.rows(), mu);
  return general_lp(ws, y, u, /*normalized=*/true);
}

IndexList predict_labels(const Matrix& f) {
  IndexList labels(static_cast<std::size_t>(f.cols()));
  for (Index j = 0; j < f.cols(); ++j) {
    if ((f.col(j).array() == 0.0).all()) {
      labels[static_cast<std::size_t>(j)] = kAbstain;
      continue;
    }
    Index best = 0;
    for (Index i = 1; i < f.rows(); ++i) {
      if (f(i, j) > f(best, j)) best = i;
    }
    labels[static_cast<std::size_t>(j)] = best;
  }
  return labels;
}

}  // namespace tmr

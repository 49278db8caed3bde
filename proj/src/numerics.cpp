#include "tmr/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace tmr {

Vector reweight_diag(const Matrix& e, Axis axis, Scalar tau) {
  if (!(tau > 0.0)) {
    throw ValidationError("reweight_diag: tau must be > 0");
  }
  const Index n = axis == Axis::Cols ? e.cols() : e.rows();
  Vector w(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar norm = axis == Axis::Cols ? e.col(i).norm() : e.row(i).norm();
    w[i] = 1.0 / (2.0 * norm + tau);
  }
  return w;
}

Matrix solve_right(const Matrix& b, const Matrix& s) {
  if (s.rows() != s.cols()) {
    throw DimensionMismatch("solve_right: S must be square");
  }
  if (b.cols() != s.rows()) {
    throw DimensionMismatch("solve_right: B columns must match S dimension");
  }
  const Scalar asym = (s - s.transpose()).norm();
  if (!(asym <= 1e-10 * std::max(1.0, s.norm()))) {
    throw ValidationError("solve_right: S is not symmetric");
  }

  // X S = B with S symmetric is S X^T = B^T.
  Eigen::LDLT<Matrix> ldlt(s);
  if (ldlt.info() != Eigen::Success) {
    throw SingularSystem("solve_right: LDLT factorization failed");
  }
  Matrix xt = ldlt.solve(b.transpose());
  // One step of iterative refinement tightens the residual on mildly
  // ill-conditioned systems.
  xt += ldlt.solve(b.transpose() - s * xt);

  const Scalar residual = (s * xt - b.transpose()).norm();
  const Scalar tol = 1e-9 * std::max(1.0, b.norm());
  if (!(residual <= tol) || !xt.allFinite()) {
    throw SingularSystem("solve_right: residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return xt.transpose();
}

Matrix solve_right_ridged(const Matrix& b, const Matrix& s) {
  try {
    return solve_right(b, s);
  } catch (const SingularSystem&) {
    Scalar ridge = 1e-10 * s.trace() / static_cast<Scalar>(s.rows());
    if (!(ridge > 0.0)) ridge = 1e-10;
    Matrix ridged = s;
    ridged.diagonal().array() += ridge;
    return solve_right(b, ridged);
  }
}

Matrix fd_gradient(const std::function<Scalar(const Matrix&)>& f, const Matrix& m,
                   Scalar h) {
  if (!(h > 0.0)) {
    throw ValidationError("fd_gradient: h must be > 0");
  }
  Matrix grad(m.rows(), m.cols());
  Matrix probe = m;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const Scalar saved = probe(i, j);
      probe(i, j) = saved + h;
      const Scalar fp = f(probe);
      probe(i, j) = saved - h;
      const Scalar fm = f(probe);
      probe(i, j) = saved;
      grad(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace tmr

#include "tmr/alptmr.hpp"

#include "tmr/baselines.hpp"
#include "tmr/graph.hpp"
#include "tmr/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace tmr {

namespace {

void validate_inputs(const Matrix& x, const Matrix& y, const SolverConfig& config) {
  if (x.cols() != y.cols()) {
    throw DimensionMismatch("alptmr: X and Y must have the same number of columns");
  }
  if (x.cols() == 0 || y.rows() == 0) {
    throw ValidationError("alptmr: empty input");
  }
  if (!(config.tol > 0.0) || config.max_iter < 0) {
    throw ValidationError("alptmr: tol must be > 0 and max_iter >= 0");
  }
  if (!(config.tau > 0.0)) {
    throw ValidationError("alptmr: tau must be > 0");
  }
  if (config.alpha < 0.0 || config.beta < 0.0 || config.gamma < 0.0) {
    throw ValidationError("alptmr: alpha, beta, gamma must be >= 0");
  }
  bool any_label = false;
  for (Index j = 0; j < y.cols(); ++j) {
    Scalar sum = 0.0;
    for (Index i = 0; i < y.rows(); ++i) {
      const Scalar v = y(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("alptmr: Y must be one-hot or zero per column");
      }
      sum += v;
    }
    if (sum > 1.0) {
      throw ValidationError("alptmr: Y column " + std::to_string(j) +
                            " has more than one label");
    }
    any_label = any_label || sum > 0.0;
  }
  if (!any_label) {
    throw ValidationError("alptmr: Y has no labeled column");
  }
}

// Solves M Z = B for Z with M symmetric, reusing the right-solve machinery
// (Z^T M = B^T), ridge retry included.
Matrix solve_left_ridged(const Matrix& m, const Matrix& b) {
  return solve_right_ridged(b.transpose(), m).transpose();
}

}  // namespace

SolverState init_state(const Matrix& x, const Matrix& y, const SolverConfig& config) {
  validate_inputs(x, y, config);
  const Index n_samples = x.cols();

  SolverState state;
  state.f = y;
  state.e_f = Matrix::Zero(y.rows(), n_samples);
  state.e_x = Matrix::Zero(x.rows(), n_samples);
  state.w = lle_weights(x, knn(x, config.k), config.lle_reg);
  state.e_w = Matrix::Zero(n_samples, n_samples);
  state.q = Vector::Ones(n_samples);
  state.d_irls = Vector::Ones(n_samples);
  state.o = Vector::Ones(n_samples);
  state.u = Vector::Constant(n_samples, config.u_unlabeled);
  for (Index j = 0; j < n_samples; ++j) {
    if (y.col(j).sum() > 0.0) state.u[j] = config.u_labeled;
  }
  state.t = 0;
  return state;
}

Matrix build_A(const Matrix& w_clean) {
  if (w_clean.rows() != w_clean.cols()) {
    throw DimensionMismatch("build_A: W must be square");
  }
  Matrix m = Matrix::Identity(w_clean.rows(), w_clean.cols()) - w_clean;
  Matrix a = m * m.transpose();
  return 0.5 * (a + a.transpose());
}

Matrix update_EX(const Matrix& x, const Matrix& a, const Vector& q, Scalar alpha_beta) {
  Matrix system = a;
  system.diagonal() += 2.0 * alpha_beta * q;
  return solve_right_ridged(x * a, system);
}

Matrix update_EF(const Matrix& f, const Matrix& a, const Vector& u, const Matrix& y,
                 const Vector& d_irls, Scalar alpha) {
  Matrix system = a;
  system.diagonal() += u + 2.0 * alpha * d_irls;
  const Matrix rhs = f * a - y * u.asDiagonal() + f * u.asDiagonal();
  return solve_right_ridged(rhs, system);
}

Matrix update_F(const Matrix& e_f, const Matrix& a, const Vector& u, const Matrix& y) {
  Matrix system = a;
  system.diagonal() += u;
  return e_f + solve_right_ridged(y * u.asDiagonal(), system);
}

Matrix build_H(const Matrix& f_clean, const Matrix& x_clean) {
  if (f_clean.cols() != x_clean.cols()) {
    throw DimensionMismatch("build_H: column counts differ");
  }
  const Index n_samples = f_clean.cols();
  Matrix h(f_clean.rows() + x_clean.rows() + 1, n_samples);
  h.topRows(f_clean.rows()) = f_clean;
  h.middleRows(f_clean.rows(), x_clean.rows()) = x_clean;
  h.bottomRows(1).setOnes();
  return h;
}

Matrix update_W_unconstrained(const Matrix& h, const Matrix& e_w) {
  Matrix gram = h.transpose() * h;
  gram = 0.5 * (gram + gram.transpose());
  Matrix system = gram;
  system.diagonal().array() += 1.0;
  // (H^T H + I)^{-1} H^T H + E_W; the solve is SPD so no ridge is needed,
  // but the shared path keeps the retry for free.
  return solve_left_ridged(system, gram) + e_w;
}

Matrix update_W(const Matrix& h, const Matrix& e_w) {
  Matrix w = update_W_unconstrained(h, e_w);
  w.diagonal().setZero();
  w = w.cwiseMax(0.0);
  return w;
}

Matrix update_EW(const Matrix& h, const Matrix& w, const Vector& o, Scalar alpha_gamma) {
  Matrix gram = h.transpose() * h;
  gram = 0.5 * (gram + gram.transpose());
  Matrix system = gram;
  system.diagonal() += Vector::Ones(gram.rows()) + 2.0 * alpha_gamma * o;
  const Matrix rhs = gram * w + w - gram;
  return solve_left_ridged(system, rhs);
}

Scalar objective(const SolverState& state, const Matrix& x, const Matrix& y,
                 const SolverConfig& config) {
  const Matrix f_clean = state.f - state.e_f;
  const Matrix x_clean = x - state.e_x;
  const Matrix w_clean = state.w - state.e_w;
  const Matrix h = build_H(f_clean, x_clean);

  const Scalar reconstruction = (h - h * w_clean).squaredNorm() + w_clean.squaredNorm();
  const Matrix fit_residual = f_clean - y;
  const Scalar fitness =
      (fit_residual * state.u.asDiagonal() * fit_residual.transpose()).trace();
  const Scalar sparsity = l21_norm(state.e_f.transpose()) +
                          config.beta * l21_norm(state.e_x.transpose()) +
                          config.gamma * l21_norm(state.e_w);
  return reconstruction + fitness + config.alpha * sparsity;
}

void step(SolverState& state, const Matrix& x, const Matrix& y,
          const SolverConfig& config) {
  const Matrix f_prev = state.f;
  const Matrix a = build_A(state.w - state.e_w);

  state.e_x = update_EX(x, a, state.q, config.alpha * config.beta);
  state.q = reweight_diag(state.e_x, Axis::Cols, config.tau);

  state.e_f = update_EF(state.f, a, state.u, y, state.d_irls, config.alpha);
  state.d_irls = reweight_diag(state.e_f, Axis::Cols, config.tau);

  state.f = update_F(state.e_f, a, state.u, y);

  const Matrix h = build_H(state.f - state.e_f, x - state.e_x);
  state.w = update_W(h, state.e_w);  // lagged E_W breaks the circular reference
  state.e_w = update_EW(h, state.w, state.o, config.alpha * config.gamma);
  state.o = reweight_diag(state.e_w, Axis::Rows, config.tau);

  if (!(state.f.allFinite() && state.e_f.allFinite() && state.e_x.allFinite() &&
        state.w.allFinite() && state.e_w.allFinite())) {
    throw NumericalError("alptmr: non-finite iterate at sweep " +
                         std::to_string(state.t + 1));
  }

  state.t += 1;
  state.f_delta_trace.push_back((state.f - f_prev).norm());
  state.objective_trace.push_back(objective(state, x, y, config));
}

RecoveredModel fit(const Matrix& x, const Matrix& y, const SolverConfig& config) {
  SolverState state = init_state(x, y, config);

  RecoveredModel model;
  model.w_init = state.w;

  bool converged = false;
  for (Index it = 0; it < config.max_iter; ++it) {
    step(state, x, y, config);
    if (state.f_delta_trace.back() <= config.tol) {
      converged = true;
      break;
    }
  }

  model.f_clean = state.f - state.e_f;
  if (config.clamp_f_clean) {
    model.f_clean = model.f_clean.cwiseMax(0.0);
  }
  model.x_clean = x - state.e_x;
  model.w_clean = state.w - state.e_w;
  // The constrained iterate has a zero diagonal; the recovered weights keep
  // that property (negatives are left in place, unlike W itself).
  model.w_clean.diagonal().setZero();
  model.f = std::move(state.f);
  model.e_f = std::move(state.e_f);
  model.e_x = std::move(state.e_x);
  model.w = std::move(state.w);
  model.e_w = std::move(state.e_w);
  model.objective_trace = std::move(state.objective_trace);
  model.f_delta_trace = std::move(state.f_delta_trace);
  model.iterations = state.t;
  model.converged = converged;
  return model;
}

IndexList classify(const RecoveredModel& model, const IndexList& unlabeled_idx) {
  Matrix selected(model.f_clean.rows(), static_cast<Index>(unlabeled_idx.size()));
  for (std::size_t i = 0; i < unlabeled_idx.size(); ++i) {
    const Index j = unlabeled_idx[i];
    if (j < 0 || j >= model.f_clean.cols()) {
      throw ValidationError("classify: index out of range");
    }
    selected.col(static_cast<Index>(i)) = model.f_clean.col(j);
  }
  return predict_labels(selected);
}

}  // namespace tmr

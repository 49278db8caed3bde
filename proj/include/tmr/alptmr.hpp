#pragma once

#include "tmr/errors.hpp"
#include "tmr/types.hpp"

#include <cstdint>

namespace tmr {

struct SolverConfig {
  Scalar alpha = 1e-2;  // weight of the l2,1 error penalties
  Scalar beta = 1e-2;   // extra factor on the data-error penalty
  Scalar gamma = 1e-2;  // extra factor on the weight-error penalty
  Scalar tau = 1e-8;    // IRLS guard against zero slices
  Index k = 7;          // nearest neighbors for the initial weights
  Scalar lle_reg = 1e-3;
  Scalar u_labeled = 1.0;
  Scalar u_unlabeled = 0.0;
  Index max_iter = 50;
  Scalar tol = 1e-3;  // stop when ||F_{t+1} - F_t||_F <= tol
  std::uint64_t seed = 0;
  // Optional post-hoc clamp of negative entries of the recovered clean soft
  // labels; off by default (the iteration itself never projects F).
  bool clamp_f_clean = false;
};

// All iterates of the triple-decomposition solver. Q, D, O are the IRLS
// diagonals of the column-wise data/label error penalties and the row-wise
// weight error penalty; d_irls is named to keep it apart from graph degree
// matrices.
struct SolverState {
  Matrix f;    // c x N soft labels
  Matrix e_f;  // c x N label error
  Matrix e_x;  // n x N data error
  Matrix w;    // N x N adaptive weights
  Matrix e_w;  // N x N weight error
  Vector q;       // IRLS diagonal for E_X columns
  Vector d_irls;  // IRLS diagonal for E_F columns
  Vector o;       // IRLS diagonal for E_W rows
  Vector u;       // fitness diagonal
  Index t = 0;
  std::vector<Scalar> objective_trace;
  std::vector<Scalar> f_delta_trace;
};

struct RecoveredModel {
  Matrix f_clean;  // F - E_F
  Matrix x_clean;  // X - E_X
  Matrix w_clean;  // W - E_W
  Matrix f, e_f, e_x, w, e_w;  // final raw iterates
  Matrix w_init;               // reconstruction weights at initialization
  std::vector<Scalar> objective_trace;
  std::vector<Scalar> f_delta_trace;
  Index iterations = 0;
  bool converged = false;
};

// Initial state: W from locally linear reconstruction weights on the K-NN
// graph, F = Y, all error matrices zero, IRLS diagonals at identity.
SolverState init_state(const Matrix& x, const Matrix& y, const SolverConfig& config);

// A = (I - W_clean)(I - W_clean)^T, symmetric positive semidefinite.
Matrix build_A(const Matrix& w_clean);

// E_X = X A (A + 2*alpha_beta*Q)^{-1}, the stationary point of
//   tr((X - E_X) A (X - E_X)^T) + 2*alpha_beta*tr(E_X Q E_X^T).
Matrix update_EX(const Matrix& x, const Matrix& a, const Vector& q, Scalar alpha_beta);

// E_F = (F A - Y U + F U)(A + U + 2*alpha*D)^{-1}, the stationary point in
// E_F of the label subproblem with F held fixed.
Matrix update_EF(const Matrix& f, const Matrix& a, const Vector& u, const Matrix& y,
                 const Vector& d_irls, Scalar alpha);

// F = E_F + Y U (A + U)^{-1}, the stationary point of the label subproblem in
// F with E_F held fixed.
Matrix update_F(const Matrix& e_f, const Matrix& a, const Vector& u, const Matrix& y);

// Vertical stack [F_clean; X_clean; ones^T] of shape (c + n + 1) x N.
Matrix build_H(const Matrix& f_clean, const Matrix& x_clean);

// Stationary point of the weighting subproblem in W with E_W held fixed:
//   W = (H^T H + I)^{-1} (H^T H (I + E_W) + E_W)  =  (H^T H + I)^{-1} H^T H + E_W.
// No constraints applied.
Matrix update_W_unconstrained(const Matrix& h, const Matrix& e_w);

// update_W_unconstrained followed by the constraint projection: diagonal
// zeroed first, then negative entries clamped to zero.
Matrix update_W(const Matrix& h, const Matrix& e_w);

// E_W = (H^T H + I + 2*alpha_gamma*O)^{-1} (H^T H W + W - H^T H), the
// stationary point of the weighting subproblem in E_W with W held fixed.
Matrix update_EW(const Matrix& h, const Matrix& w, const Vector& o, Scalar alpha_gamma);

// Monitored objective (non-squared l2,1 penalties):
//   ||H - H W_clean||_F^2 + ||W_clean||_F^2
//   + tr((F_clean - Y) U (F_clean - Y)^T)
//   + alpha * (||E_F^T||_21 + beta*||E_X^T||_21 + gamma*||E_W||_21).
Scalar objective(const SolverState& state, const Matrix& x, const Matrix& y,
                 const SolverConfig& config);

// One Gauss-Seidel sweep in the order E_X, E_F, F, W, E_W, with each IRLS
// diagonal refreshed right after its error update and A rebuilt from the
// clean weights at sweep start. Appends to the objective and F-delta traces.
void step(SolverState& state, const Matrix& x, const Matrix& y,
          const SolverConfig& config);

// Runs sweeps until ||F_{t+1} - F_t||_F <= tol or max_iter, then returns the
// recovered clean matrices and diagnostics. Not converging within max_iter is
// reported through the converged flag, not an error.
RecoveredModel fit(const Matrix& x, const Matrix& y, const SolverConfig& config);

// Hard labels of the requested columns of the recovered clean soft labels.
IndexList classify(const RecoveredModel& model, const IndexList& unlabeled_idx);

}  // namespace tmr

#pragma once

#include "lqrsyn/types.hpp"

namespace lqrsyn {

/// Largest eigenvalue magnitude of a square matrix.
double spectral_radius(const MatrixXd& M);

/// True iff rho(sqrt(alpha) (A + B F)) < 1 - margin.
bool is_stabilizing(const SystemModel& model, const MatrixXd& F);

/// Wraps F together with a freshly computed stabilizing certificate.
Gain make_gain(const SystemModel& model, const MatrixXd& F);

/// Augmented closed-loop map of the joint state v = [x; u].
struct ClosedLoop {
  MatrixXd augmented;   // [[A, B], [FA, FB]], (n+m) x (n+m)
  MatrixXd state_map;   // A + B F, n x n
};

ClosedLoop closed_loop(const SystemModel& model, const MatrixXd& F);

/// Solves alpha A_F' P A_F - P + Lambda = 0 by dense vectorization.
/// Requires rho(sqrt(alpha) A_F) < 1.
BlockSym solve_stein_value(const SystemModel& model, const MatrixXd& F,
                           const MatrixXd& Lambda);

/// Solves S = alpha A_F S A_F' + N. Requires rho(sqrt(alpha) A_F) < 1 and
/// N PSD.
BlockSym solve_stein_covariance(const SystemModel& model, const MatrixXd& F,
                                const MatrixXd& N);

struct DareResult {
  MatrixXd P;  // stabilizing value matrix, n x n
  Gain gain;   // F = -alpha (R + alpha B'PB)^-1 B'PA
  int iterations = 0;
};

/// Discounted Riccati fixed point via value iteration:
///   P <- Q + alpha A'PA - alpha^2 A'PB (R + alpha B'PB)^-1 B'PA.
/// Independent ground truth for every synthesis pathway.
DareResult dare_oracle(const SystemModel& model, const CostSpec& cost,
                       int max_iter = 100000);

namespace detail {
// Solves X = M X M' + N by vectorization; M must have rho(M) < 1.
MatrixXd stein_fixed_point(const MatrixXd& M, const MatrixXd& N);
}  // namespace detail

}  // namespace lqrsyn

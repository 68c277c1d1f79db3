#pragma once

#include <vector>

#include "lqrsyn/linalg.hpp"
#include "lqrsyn/types.hpp"

namespace lqrsyn {

/// Horizon M such that the geometric tail of a discounted aggregate is
/// predicted below eps, based on beta = alpha * rho(A + BF)^2.
int default_horizon(const SystemModel& model, const MatrixXd& F,
                    double eps = 1e-8, int max_horizon = 2000000);

/// S~ = sum_{k=0}^M alpha^k [x; Fx][x; Fx]' along x(k+1) = (A + BF)x(k),
/// x(0) = z.
BlockSym rollout_state_aggregate(const SystemModel& model, const MatrixXd& F,
                                 const VectorXd& z, int M);

/// P~ = sum_i sum_{k=0}^M alpha^k xi(k) xi(k)' along the adjoint system
/// xi(k+1) = A_F' xi(k), xi(0) = xi_i. The xi-set must reproduce Lambda as
/// its Gram matrix.
BlockSym rollout_adjoint_aggregate(const SystemModel& model, const MatrixXd& F,
                                   const std::vector<VectorXd>& xi_set,
                                   const MatrixXd& Lambda, int M);

struct AugmentedAggregate {
  BlockSym S;   // sum_i sum_{k=0}^M alpha^k v(k) v(k)'
  MatrixXd W;   // sum_i sum_{k=0}^M alpha^k v(k+1) v(k)'
};

/// Rolls the augmented state v = [x; u] under v(k+1) = A_F v(k); u(0) is
/// taken from the seed as given, u(k) = F x(k) from k = 1 on.
AugmentedAggregate rollout_augmented(const SystemModel& model,
                                     const MatrixXd& F,
                                     const std::vector<VectorXd>& v_set,
                                     int M);

/// Truncated discounted cost sum_{k=0}^M alpha^k [x; Fx]' Lambda [x; Fx].
double discounted_cost(const SystemModel& model, const MatrixXd& F,
                       const VectorXd& z, const CostSpec& cost, int M);

/// Columns of the Cholesky-like factor of a PSD matrix: the smallest exact
/// set with sum_i c_i c_i' = X. Default xi/v seed sets.
std::vector<VectorXd> psd_factor_columns(const MatrixXd& X);

}  // namespace lqrsyn

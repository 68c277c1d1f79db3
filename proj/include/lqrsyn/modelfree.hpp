#pragma once

#include <memory>
#include <vector>

#include "lqrsyn/pgd.hpp"
#include "lqrsyn/types.hpp"

namespace lqrsyn {

/// The only system access the model-free pathway gets: simulate the
/// augmented state v = [x; u] from a seed under a candidate gain. There is
/// deliberately no accessor for A or B.
class TrajectorySource {
 public:
  virtual ~TrajectorySource() = default;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual double alpha() const = 0;
  /// Returns v(0), ..., v(steps); u(0) is the input block of the seed,
  /// u(k) = F x(k) afterwards.
  virtual std::vector<VectorXd> simulate(const MatrixXd& F, const VectorXd& v0,
                                         int steps) const = 0;
};

/// Trajectory source backed by an exact plant simulation.
class SystemTrajectorySource final : public TrajectorySource {
 public:
  explicit SystemTrajectorySource(SystemModel model)
      : model_(std::move(model)) {}

  int state_dim() const override { return model_.n(); }
  int input_dim() const override { return model_.m(); }
  double alpha() const override { return model_.alpha; }
  std::vector<VectorXd> simulate(const MatrixXd& F, const VectorXd& v0,
                                 int steps) const override;

 private:
  SystemModel model_;
};

/// Recovers P from rollout aggregates by solving the linear matrix equation
///   alpha W' P W + S~ (Lambda - P) S~ = 0
/// in the half-vectorized symmetric parameterization (least squares with a
/// residual gate).
BlockSym solve_value_from_data(const BlockSym& S_tilde, const MatrixXd& W,
                               const CostSpec& cost, double alpha);

/// Gradient of the Gamma-cost: 2 P12'(S11 - Gamma11) + 2 P22 F (S11 - Gamma11).
MatrixXd gradient_model_free(const BlockSym& P, const BlockSym& S_tilde,
                             const MatrixXd& F, const MatrixXd& Gamma11);

/// Model-free projected gradient descent. Consumes only trajectories from
/// `source`; Gamma is the Gram matrix of v_set.
PgdRun pgd_modelfree_run(const TrajectorySource& source, const CostSpec& cost,
                         const StructureMask& mask, const MatrixXd& F0,
                         const std::vector<VectorXd>& v_set,
                         const PgdConfig& cfg);

}  // namespace lqrsyn

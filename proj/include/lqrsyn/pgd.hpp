#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqrsyn/trajectory.hpp"
#include "lqrsyn/types.hpp"

namespace lqrsyn {

/// Binary sparsity pattern on the gain; K = {F : F o pattern = F}.
struct StructureMask {
  MatrixXd pattern;  // m x n, entries in {0, 1}

  explicit StructureMask(MatrixXd p) : pattern(std::move(p)) {
    for (int i = 0; i < pattern.rows(); ++i)
      for (int j = 0; j < pattern.cols(); ++j)
        if (pattern(i, j) != 0.0 && pattern(i, j) != 1.0)
          throw std::invalid_argument("StructureMask: entries must be 0 or 1");
  }

  static StructureMask ones(int m, int n) {
    return StructureMask(MatrixXd::Ones(m, n));
  }

  bool contains(const MatrixXd& F) const {
    return (F.cwiseProduct(pattern) - F).norm() == 0.0;
  }
};

/// Hadamard projection onto the gain subspace.
MatrixXd project_structure(const MatrixXd& F, const StructureMask& mask);

enum class StepRule { kConstant, kDiminishing, kArmijo };

struct PgdConfig {
  StepRule rule = StepRule::kArmijo;
  double gamma = 1e-3;        // constant step
  double gamma0 = 1e-3;       // diminishing: gamma0 / (1 + t)
  double armijo_sigma = 1e-4;
  double armijo_beta = 0.5;
  double armijo_gamma_max = 1.0;
  int max_iter = 5000;
  double grad_tol = 1e-6;
  std::optional<int> horizon;      // simulated modes; nullopt = auto
  double horizon_eps = 1e-8;
  bool record_history = true;
};

struct PgdIterate {
  int t;
  MatrixXd F;
  double cost;
  double grad_norm;  // Frobenius norm of the projected descent direction
};

struct PgdRun {
  std::vector<PgdIterate> history;
  Gain final_gain;
  double final_cost = 0.0;
  int iterations = 0;
  std::string termination;  // "grad_tol" or "max_iter"
};

/// Analytic cost gradient 2 (P12' + P22 F) S11 with S, P from exact Stein
/// solves for the z-cost.
MatrixXd gradient_model_based(const SystemModel& model, const MatrixXd& F,
                              const CostSpec& cost, const VectorXd& z);

enum class PgdMode { kExact, kSimulated };

/// Projected gradient descent over the structured gain subspace for the
/// z-cost. In simulated mode the S and P matrices come from truncated
/// rollouts instead of Stein solves.
PgdRun pgd_run(const SystemModel& model, const CostSpec& cost,
               const StructureMask& mask, const MatrixXd& F0,
               const VectorXd& z, const PgdConfig& cfg,
               PgdMode mode = PgdMode::kExact);

namespace detail {

// Shared descent loop: J evaluates the cost (+inf allowed for unstable
// candidates), grad returns the raw m x n gradient.
PgdRun pgd_loop(const std::function<double(const MatrixXd&)>& J,
                const std::function<MatrixXd(const MatrixXd&)>& grad,
                const std::function<bool(const MatrixXd&)>& stabilizing,
                const StructureMask& mask, const MatrixXd& F0,
                const PgdConfig& cfg);

}  // namespace detail

}  // namespace lqrsyn

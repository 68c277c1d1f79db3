#include "lqrsyn/pgd.hpp"

#include <cmath>
#include <limits>

namespace lqrsyn {

MatrixXd project_structure(const MatrixXd& F, const StructureMask& mask) {
  if (F.rows() != mask.pattern.rows() || F.cols() != mask.pattern.cols())
    throw DimensionError("project_structure: F and mask dimensions differ");
  return F.cwiseProduct(mask.pattern);
}

MatrixXd gradient_model_based(const SystemModel& model, const MatrixXd& F,
                              const CostSpec& cost, const VectorXd& z) {
  const int n = model.n(), m = model.m();
  if (z.size() != n)
    throw DimensionError("gradient_model_based: z must have length n");
  MatrixXd inj(n + m, n + m);
  MatrixXd stack(n + m, n);
  stack.topRows(n) = MatrixXd::Identity(n, n);
  stack.bottomRows(m) = F;
  inj = stack * z * z.transpose() * stack.transpose();
  const BlockSym S = solve_stein_covariance(model, F, inj);
  const BlockSym P = solve_stein_value(model, F, cost.lambda());
  return 2.0 * (P.b12().transpose() + P.b22() * F) * S.b11();
}

namespace detail {

PgdRun pgd_loop(const std::function<double(const MatrixXd&)>& J,
                const std::function<MatrixXd(const MatrixXd&)>& grad,
                const std::function<bool(const MatrixXd&)>& stabilizing,
                const StructureMask& mask, const MatrixXd& F0,
                const PgdConfig& cfg) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (!mask.contains(F0))
    throw std::invalid_argument("pgd: F0 does not lie in the mask subspace");
  if (!stabilizing(F0))
    throw InstabilityError("pgd: F0 is not stabilizing");

  PgdRun run;
  MatrixXd F = F0;
  double Jf = J(F);
  int t = 0;
  run.termination = "max_iter";
  for (; t < cfg.max_iter; ++t) {
    const MatrixXd d = project_structure(grad(F), mask);
    const double dn = d.norm();
    if (cfg.record_history) run.history.push_back({t, F, Jf, dn});
    if (dn <= cfg.grad_tol) {
      run.termination = "grad_tol";
      break;
    }

    MatrixXd Fn;
    double Jn = kInf;
    if (cfg.rule == StepRule::kArmijo) {
      double gamma = cfg.armijo_gamma_max;
      bool accepted = false;
      for (int ls = 0; ls < 80; ++ls) {
        Fn = project_structure(F - gamma * d, mask);
        if (stabilizing(Fn)) {
          Jn = J(Fn);
          if (Jn <= Jf - cfg.armijo_sigma * gamma * dn * dn) {
            accepted = true;
            break;
          }
        }
        gamma *= cfg.armijo_beta;
      }
      if (!accepted) {
        // Step underflow; the iterate is numerically stationary.
        run.termination = "grad_tol";
        break;
      }
    } else {
      const double gamma = (cfg.rule == StepRule::kConstant)
                               ? cfg.gamma
                               : cfg.gamma0 / (1.0 + t);
      Fn = project_structure(F - gamma * d, mask);
      if (!stabilizing(Fn))
        throw InstabilityError("pgd: iterate " + std::to_string(t + 1) +
                               " left the stabilizing set");
      Jn = J(Fn);
    }
    F = Fn;
    Jf = Jn;
  }
  run.iterations = t;
  run.final_cost = Jf;
  run.final_gain = Gain{F, stabilizing(F)};
  return run;
}

}  // namespace detail

PgdRun pgd_run(const SystemModel& model, const CostSpec& cost,
               const StructureMask& mask, const MatrixXd& F0,
               const VectorXd& z, const PgdConfig& cfg, PgdMode mode) {
  const MatrixXd Lambda = cost.lambda();

  auto stab = [&](const MatrixXd& F) { return is_stabilizing(model, F); };

  std::function<double(const MatrixXd&)> J;
  std::function<MatrixXd(const MatrixXd&)> grad;
  if (mode == PgdMode::kExact) {
    J = [&, Lambda](const MatrixXd& F) {
      const int n = model.n(), m = model.m();
      MatrixXd stack(n + m, n);
      stack.topRows(n) = MatrixXd::Identity(n, n);
      stack.bottomRows(m) = F;
      const MatrixXd inj = stack * z * z.transpose() * stack.transpose();
      return (Lambda * solve_stein_covariance(model, F, inj).full()).trace();
    };
    grad = [&](const MatrixXd& F) {
      return gradient_model_based(model, F, cost, z);
    };
  } else {
    auto horizon = [&](const MatrixXd& F) {
      return cfg.horizon ? *cfg.horizon
                         : default_horizon(model, F, cfg.horizon_eps);
    };
    J = [&, horizon](const MatrixXd& F) {
      return discounted_cost(model, F, z, cost, horizon(F));
    };
    grad = [&, horizon, Lambda](const MatrixXd& F) {
      const int M = horizon(F);
      const BlockSym S = rollout_state_aggregate(model, F, z, M);
      const BlockSym P = rollout_adjoint_aggregate(
          model, F, psd_factor_columns(Lambda), Lambda, M);
      return MatrixXd(2.0 * (P.b12().transpose() + P.b22() * F) * S.b11());
    };
  }
  return detail::pgd_loop(J, grad, stab, mask, F0, cfg);
}

}  // namespace lqrsyn

#include "lqrsyn/modelfree.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "lqrsyn/linalg.hpp"
#include "lqrsyn/trajectory.hpp"

namespace lqrsyn {

std::vector<VectorXd> SystemTrajectorySource::simulate(const MatrixXd& F,
                                                       const VectorXd& v0,
                                                       int steps) const {
  if (steps < 0) throw std::invalid_argument("simulate: steps < 0");
  const int n = model_.n(), m = model_.m();
  if (v0.size() != n + m)
    throw DimensionError("simulate: seed must have n+m rows");
  if (F.rows() != m || F.cols() != n)
    throw DimensionError("simulate: F must be m x n");
  std::vector<VectorXd> out;
  out.reserve(steps + 1);
  VectorXd v = v0;
  out.push_back(v);
  for (int k = 0; k < steps; ++k) {
    VectorXd x = model_.A * v.head(n) + model_.B * v.tail(m);
    VectorXd vn(n + m);
    vn.head(n) = x;
    vn.tail(m) = F * x;
    out.push_back(vn);
    v.swap(vn);
  }
  return out;
}

BlockSym solve_value_from_data(const BlockSym& S_tilde, const MatrixXd& W,
                               const CostSpec& cost, double alpha) {
  const int d = static_cast<int>(S_tilde.full().rows());
  if (W.rows() != d || W.cols() != d)
    throw DimensionError("solve_value_from_data: W must be (n+m) x (n+m)");
  const MatrixXd Lambda = cost.lambda();
  if (Lambda.rows() != d)
    throw DimensionError("solve_value_from_data: cost dimensions mismatch");

  const MatrixXd& S = S_tilde.full();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  if (es.eigenvalues().minCoeff() <= kPsdTol * std::abs(S.trace()))
    throw ExcitationError(
        "solve_value_from_data: S~ is singular or near-singular; increase "
        "seeds or horizon");

  // Symmetric basis: E_ij = e_i e_j' + e_j e_i' (i < j), E_ii = e_i e_i'.
  const int p = d * (d + 1) / 2;
  MatrixXd Amat(d * d, p);
  int q = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j, ++q) {
      MatrixXd E = MatrixXd::Zero(d, d);
      E(i, j) = 1.0;
      E(j, i) = 1.0;
      const MatrixXd C = alpha * W.transpose() * E * W - S * E * S;
      Amat.col(q) = C.reshaped();
    }
  }
  const VectorXd rhs = VectorXd{(-(S * Lambda * S)).reshaped()};
  const VectorXd sol = Amat.colPivHouseholderQr().solve(rhs);
  const double residual = (Amat * sol - rhs).norm();
  if (residual > 1e-8 * (1.0 + Lambda.norm()) * (1.0 + S.squaredNorm()))
    throw NumericalError("solve_value_from_data: residual gate failed");

  MatrixXd P = MatrixXd::Zero(d, d);
  q = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j, ++q) P(i, j) = P(j, i) = sol(q);
  return BlockSym(P, S_tilde.n());
}

MatrixXd gradient_model_free(const BlockSym& P, const BlockSym& S_tilde,
                             const MatrixXd& F, const MatrixXd& Gamma11) {
  const int n = S_tilde.n(), m = S_tilde.m();
  if (F.rows() != m || F.cols() != n)
    throw DimensionError("gradient_model_free: F must be m x n");
  if (Gamma11.rows() != n || Gamma11.cols() != n)
    throw DimensionError("gradient_model_free: Gamma11 must be n x n");
  const MatrixXd H = S_tilde.b11() - Gamma11;
  return 2.0 * P.b12().transpose() * H + 2.0 * P.b22() * F * H;
}

namespace {

// Closed-loop map reconstructed from one-step rollouts of basis seeds; this
// is trajectory data, not model access.
MatrixXd observed_loop_map(const TrajectorySource& source, const MatrixXd& F) {
  const int d = source.state_dim() + source.input_dim();
  MatrixXd Af(d, d);
  for (int i = 0; i < d; ++i) {
    const auto traj = source.simulate(F, VectorXd::Unit(d, i), 1);
    Af.col(i) = traj[1];
  }
  return Af;
}

}  // namespace

PgdRun pgd_modelfree_run(const TrajectorySource& source, const CostSpec& cost,
                         const StructureMask& mask, const MatrixXd& F0,
                         const std::vector<VectorXd>& v_set,
                         const PgdConfig& cfg) {
  const int n = source.state_dim(), m = source.input_dim();
  const double alpha = source.alpha();
  if (v_set.empty())
    throw std::invalid_argument("pgd_modelfree_run: empty seed set");
  const MatrixXd Gamma = ExcitationSpec::gram(v_set);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Gamma);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ExcitationError("pgd_modelfree_run: seed Gram matrix Gamma not PD");
  const MatrixXd Gamma11 = Gamma.topLeftCorner(n, n);
  const MatrixXd Lambda = cost.lambda();

  auto stabilizing = [&](const MatrixXd& F) {
    return std::sqrt(alpha) * spectral_radius(observed_loop_map(source, F)) <
           1.0 - kStabilityMargin;
  };
  auto horizon = [&](const MatrixXd& F) {
    if (cfg.horizon) return *cfg.horizon;
    const double rho = spectral_radius(observed_loop_map(source, F));
    const double beta = alpha * rho * rho;
    if (beta >= 1.0) return 2000000;
    if (beta <= 0.0) return 1;
    return std::min(
        2000000,
        std::max(1, static_cast<int>(std::ceil(
                        std::log(cfg.horizon_eps * (1.0 - beta)) /
                        std::log(beta)))));
  };
  auto aggregates = [&](const MatrixXd& F, int M) {
    const int d = n + m;
    MatrixXd S = MatrixXd::Zero(d, d);
    MatrixXd W = MatrixXd::Zero(d, d);
    for (const auto& v0 : v_set) {
      const auto traj = source.simulate(F, v0, M + 1);
      double w = 1.0;
      for (int k = 0; k <= M; ++k) {
        S.noalias() += w * traj[k] * traj[k].transpose();
        W.noalias() += w * traj[k + 1] * traj[k].transpose();
        w *= alpha;
      }
    }
    return AugmentedAggregate{BlockSym(0.5 * (S + S.transpose()), n), W};
  };

  auto J = [&](const MatrixXd& F) {
    if (!stabilizing(F)) return std::numeric_limits<double>::infinity();
    const auto agg = aggregates(F, horizon(F));
    return (Lambda * agg.S.full()).trace();
  };
  auto grad = [&](const MatrixXd& F) {
    const auto agg = aggregates(F, horizon(F));
    const BlockSym P = solve_value_from_data(agg.S, agg.W, cost, alpha);
    return gradient_model_free(P, agg.S, F, Gamma11);
  };
  return detail::pgd_loop(J, grad, stabilizing, mask, F0, cfg);
}

}  // namespace lqrsyn

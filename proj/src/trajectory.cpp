#include "lqrsyn/trajectory.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace lqrsyn {

int default_horizon(const SystemModel& model, const MatrixXd& F, double eps,
                    int max_horizon) {
  const double rho = spectral_radius(model.A + model.B * F);
  const double beta = model.alpha * rho * rho;
  if (beta <= 0.0) return 1;
  if (beta >= 1.0) return max_horizon;
  const double M = std::log(eps * (1.0 - beta)) / std::log(beta);
  const int Mi = static_cast<int>(std::ceil(M));
  return std::min(std::max(Mi, 1), max_horizon);
}

BlockSym rollout_state_aggregate(const SystemModel& model, const MatrixXd& F,
                                 const VectorXd& z, int M) {
  if (M < 0) throw std::invalid_argument("rollout_state_aggregate: M < 0");
  const int n = model.n(), m = model.m();
  if (z.size() != n)
    throw DimensionError("rollout_state_aggregate: z must have length n");
  if (F.rows() != m || F.cols() != n)
    throw DimensionError("rollout_state_aggregate: F must be m x n");

  MatrixXd S = MatrixXd::Zero(n + m, n + m);
  VectorXd x = z;
  double w = 1.0;
  VectorXd v(n + m);
  for (int k = 0; k <= M; ++k) {
    v.head(n) = x;
    v.tail(m) = F * x;
    S.noalias() += w * v * v.transpose();
    x = (model.A * x + model.B * v.tail(m)).eval();
    w *= model.alpha;
  }
  return BlockSym(S, n);
}

BlockSym rollout_adjoint_aggregate(const SystemModel& model, const MatrixXd& F,
                                   const std::vector<VectorXd>& xi_set,
                                   const MatrixXd& Lambda, int M) {
  if (M < 0) throw std::invalid_argument("rollout_adjoint_aggregate: M < 0");
  const int n = model.n(), m = model.m();
  const int d = n + m;
  if (Lambda.rows() != d || Lambda.cols() != d)
    throw DimensionError("rollout_adjoint_aggregate: Lambda must be (n+m)^2");
  MatrixXd gram = MatrixXd::Zero(d, d);
  for (const auto& xi : xi_set) {
    if (xi.size() != d)
      throw DimensionError("rollout_adjoint_aggregate: xi must have n+m rows");
    gram += xi * xi.transpose();
  }
  if ((gram - Lambda).norm() > 1e-10 * (1.0 + Lambda.norm()))
    throw std::invalid_argument(
        "rollout_adjoint_aggregate: xi-set Gram matrix does not match Lambda");

  const MatrixXd AfT = closed_loop(model, F).augmented.transpose();
  MatrixXd P = MatrixXd::Zero(d, d);
  for (const auto& xi0 : xi_set) {
    VectorXd xi = xi0;
    double w = 1.0;
    for (int k = 0; k <= M; ++k) {
      P.noalias() += w * xi * xi.transpose();
      xi = (AfT * xi).eval();
      w *= model.alpha;
    }
  }
  return BlockSym(P, n);
}

AugmentedAggregate rollout_augmented(const SystemModel& model,
                                     const MatrixXd& F,
                                     const std::vector<VectorXd>& v_set,
                                     int M) {
  if (M < 0) throw std::invalid_argument("rollout_augmented: M < 0");
  if (v_set.empty())
    throw std::invalid_argument("rollout_augmented: need at least one seed");
  const int n = model.n(), m = model.m();
  const int d = n + m;
  const MatrixXd Af = closed_loop(model, F).augmented;

  MatrixXd S = MatrixXd::Zero(d, d);
  MatrixXd W = MatrixXd::Zero(d, d);
  for (const auto& v0 : v_set) {
    if (v0.size() != d)
      throw DimensionError("rollout_augmented: seeds must have n+m rows");
    VectorXd v = v0;
    double w = 1.0;
    for (int k = 0; k <= M; ++k) {
      VectorXd vnext = Af * v;
      S.noalias() += w * v * v.transpose();
      W.noalias() += w * vnext * v.transpose();
      v.swap(vnext);
      w *= model.alpha;
    }
  }
  return AugmentedAggregate{BlockSym(0.5 * (S + S.transpose()), n), W};
}

double discounted_cost(const SystemModel& model, const MatrixXd& F,
                       const VectorXd& z, const CostSpec& cost, int M) {
  const BlockSym S = rollout_state_aggregate(model, F, z, M);
  return (cost.lambda() * S.full()).trace();
}

std::vector<VectorXd> psd_factor_columns(const MatrixXd& X) {
  if (X.rows() != X.cols())
    throw DimensionError("psd_factor_columns: matrix must be square");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (X + X.transpose()));
  if (es.eigenvalues().minCoeff() < -kPsdTol * (1.0 + std::abs(X.trace())))
    throw std::invalid_argument("psd_factor_columns: matrix is not PSD");
  std::vector<VectorXd> cols;
  for (int i = 0; i < X.rows(); ++i) {
    const double lam = std::max(es.eigenvalues()(i), 0.0);
    if (lam > 0.0) cols.push_back(std::sqrt(lam) * es.eigenvectors().col(i));
  }
  if (cols.empty()) cols.push_back(VectorXd::Zero(X.rows()));
  return cols;
}

}  // namespace lqrsyn
